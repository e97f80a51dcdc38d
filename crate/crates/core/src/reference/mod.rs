//! High-precision numerical reference for the main problem.
//!
//! Position, velocity and the fictitious time τ (dτ/dt = Γ/r²) are
//! integrated together so that the reference can be sampled either at a
//! physical time or at a value of τ.

pub mod dop853;
mod tableau;

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::elements::{CartesianState, GravityModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
pub use dop853::Stats;
use dop853::{integrate, DenseStep, System};

pub use dop853::Dop853Options as ReferenceOptions;

/// (x, y, z, vx, vy, vz, τ).
pub const STATE_DIM: usize = 7;
pub const TAU: usize = 6;

pub type RefState<S> = [S; STATE_DIM];

fn norm<S: Scalar>(v: &[S; 3]) -> S {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Central plus J2 acceleration.
pub fn accel_main_problem<S: Scalar>(r: &[S; 3], model: &GravityModel) -> [S; 3] {
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let rn = r2.sqrt();
    let inv_r3 = (r2 * rn).recip();
    let z2 = r[2] * r[2] / r2;
    let k = inv_r3 / r2 * (1.5 * model.j2 * model.mu * model.re * model.re);
    let planar = -(z2 * 5.0) + 1.0;
    let central = inv_r3 * model.mu;
    [
        -(central * r[0]) - k * r[0] * planar,
        -(central * r[1]) - k * r[1] * planar,
        -(central * r[2]) - k * r[2] * (-(z2 * 5.0) + 3.0),
    ]
}

/// Γ = Θ(1 + √(1 + 2J2(μ/r)(R⊕/Θ)²P2(sin β)))/2 from position and velocity.
pub fn gamma_cartesian<S: Scalar>(r: &[S; 3], v: &[S; 3], model: &GravityModel) -> S {
    let hx = r[1] * v[2] - r[2] * v[1];
    let hy = r[2] * v[0] - r[0] * v[2];
    let hz = r[0] * v[1] - r[1] * v[0];
    let theta2 = hx * hx + hy * hy + hz * hz;
    let rn = norm(r);
    let sin_lat = r[2] / rn;
    let p2 = (sin_lat.sq() * 3.0 - 1.0) * 0.5;
    let radicand =
        (rn * theta2).recip() * p2 * (2.0 * model.j2 * model.mu * model.re * model.re) + 1.0;
    theta2.sqrt() * (radicand.sqrt() + 1.0) * 0.5
}

/// Total energy including the J2 term.
pub fn energy<S: Scalar>(y: &RefState<S>, model: &GravityModel) -> S {
    let r = [y[0], y[1], y[2]];
    let rn = norm(&r);
    let v2 = y[3] * y[3] + y[4] * y[4] + y[5] * y[5];
    let sin_lat = y[2] / rn;
    let p2 = (sin_lat.sq() * 3.0 - 1.0) * 0.5;
    let j2 = (rn.powi(3)).recip() * p2 * (model.j2 * model.mu * model.re * model.re);
    v2 * 0.5 - rn.recip() * model.mu + j2
}

/// Polar component of the angular momentum.
pub fn polar_momentum<S: Scalar>(y: &RefState<S>) -> S {
    y[0] * y[4] - y[1] * y[3]
}

/// Equations of motion with the τ clock attached.
#[derive(Clone, Copy, Debug)]
pub struct MainProblem {
    pub model: GravityModel,
}

impl<S: Scalar> System<S, STATE_DIM> for MainProblem {
    fn rhs(&self, _t: S, y: &RefState<S>) -> RefState<S> {
        let r = [y[0], y[1], y[2]];
        let v = [y[3], y[4], y[5]];
        let a = accel_main_problem(&r, &self.model);
        let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        let dtau = gamma_cartesian(&r, &v, &self.model) / r2;
        [v[0], v[1], v[2], a[0], a[1], a[2], dtau]
    }
}

pub fn initial_state<S: Scalar>(x0: &CartesianState) -> RefState<S> {
    let (p, v) = (x0.position, x0.velocity);
    [p.x, p.y, p.z, v.x, v.y, v.z, 0.0].map(S::cst)
}

pub fn to_cartesian<S: Scalar>(y: &RefState<S>, t: f64) -> CartesianState {
    CartesianState::new(
        Vector3::new(y[0].value(), y[1].value(), y[2].value()),
        Vector3::new(y[3].value(), y[4].value(), y[5].value()),
        t,
    )
}

/// Largest relative excursions of the conserved quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Drift {
    pub energy: f64,
    pub polar_momentum: f64,
}

struct DriftTracker<S> {
    e0: S,
    n0: S,
    drift: Drift,
}

impl<S: Scalar> DriftTracker<S> {
    fn new(y0: &RefState<S>, model: &GravityModel) -> Self {
        DriftTracker {
            e0: energy(y0, model),
            n0: polar_momentum(y0),
            drift: Drift::default(),
        }
    }

    fn update(&mut self, y: &RefState<S>, model: &GravityModel) {
        let de = ((energy(y, model) - self.e0) / self.e0).value().abs();
        let dn = ((polar_momentum(y) - self.n0) / self.n0).value().abs();
        self.drift.energy = self.drift.energy.max(de);
        self.drift.polar_momentum = self.drift.polar_momentum.max(dn);
    }
}

/// Time within `step` at which τ reaches `tau`, by Newton with dt/dτ = r²/Γ.
fn invert_tau<S: Scalar>(
    step: &DenseStep<S, STATE_DIM>,
    tau: S,
    model: &GravityModel,
) -> (S, RefState<S>) {
    let tau0 = step.cont[0][TAU];
    let tau1 = step.y_end[TAU];
    let mut t = step.t + step.h * ((tau - tau0) / (tau1 - tau0));
    let mut y = step.eval(t);
    for _ in 0..12 {
        let r = [y[0], y[1], y[2]];
        let v = [y[3], y[4], y[5]];
        let rate = gamma_cartesian(&r, &v, model) / (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        let dt = (tau - y[TAU]) / rate;
        t = t + dt;
        y = step.eval(t);
        if dt.value().abs() <= 1e-24 * t.value().abs().max(1.0) {
            break;
        }
    }
    (t, y)
}

/// Dense reference trajectory kept in memory.
#[derive(Clone, Debug)]
pub struct ReferenceTrajectory<S> {
    pub model: GravityModel,
    pub steps: Vec<DenseStep<S, STATE_DIM>>,
    pub stats: Stats,
    pub drift: Drift,
}

impl<S: Scalar + FromStr> ReferenceTrajectory<S> {
    pub fn propagate(
        x0: &CartesianState,
        model: &GravityModel,
        duration: f64,
        opts: &ReferenceOptions,
    ) -> Result<Self> {
        let sys = MainProblem { model: *model };
        let y0 = initial_state::<S>(x0);
        let mut tracker = DriftTracker::new(&y0, model);
        let mut steps = Vec::new();
        let t0 = S::cst(x0.t);
        let (_, stats) = integrate(&sys, t0, y0, t0 + duration, opts, |step| {
            tracker.update(&step.y_end, model);
            steps.push(*step);
        })?;
        Ok(ReferenceTrajectory {
            model: *model,
            steps,
            stats,
            drift: tracker.drift,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.t.value())
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.t_end().value())
    }

    fn out_of_span(&self, value: f64) -> Error {
        Error::OutOfSpan {
            value,
            start: self.t_start(),
            end: self.t_end(),
        }
    }

    pub fn sample_at_time(&self, t: S) -> Result<RefState<S>> {
        let tv = t.value();
        if self.steps.is_empty() || tv < self.t_start() || tv > self.t_end() {
            return Err(self.out_of_span(tv));
        }
        let idx = self.steps.partition_point(|s| s.t_end().value() < tv);
        Ok(self.steps[idx.min(self.steps.len() - 1)].eval(t))
    }

    pub fn state_at_time(&self, t: f64) -> Result<CartesianState> {
        Ok(to_cartesian(&self.sample_at_time(S::cst(t))?, t))
    }

    /// Physical time and state at which the integrated τ equals `tau`.
    pub fn time_at_tau(&self, tau: S) -> Result<(S, RefState<S>)> {
        let tv = tau.value();
        let (first, last) = match (self.steps.first(), self.steps.last()) {
            (Some(f), Some(l)) => (f.cont[0][TAU].value(), l.y_end[TAU].value()),
            _ => return Err(self.out_of_span(tv)),
        };
        if tv < first || tv > last {
            return Err(Error::OutOfSpan {
                value: tv,
                start: first,
                end: last,
            });
        }
        let idx = self.steps.partition_point(|s| s.y_end[TAU].value() < tv);
        Ok(invert_tau(
            &self.steps[idx.min(self.steps.len() - 1)],
            tau,
            &self.model,
        ))
    }

    pub fn state_at_tau(&self, tau: f64) -> Result<(CartesianState, S)> {
        let (t, y) = self.time_at_tau(S::cst(tau))?;
        Ok((to_cartesian(&y, t.value()), t))
    }

    /// Writes t, τ, x, y, z, vx, vy, vz at the given times, 17 significant digits.
    pub fn write_csv(&self, path: &Path, times: &[f64]) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,tau,x,y,z,vx,vy,vz")?;
        for &t in times {
            let y = self.sample_at_time(S::cst(t))?;
            write!(out, "{t:.16e},{:.16e}", y[TAU].value())?;
            for v in &y[..6] {
                write!(out, ",{:.16e}", v.value())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// One reference sample.
#[derive(Clone, Copy, Debug)]
pub struct Sample<S> {
    pub t: S,
    pub y: RefState<S>,
}

impl<S: Scalar> Sample<S> {
    pub fn tau(&self) -> S {
        self.y[TAU]
    }

    pub fn state(&self) -> CartesianState {
        to_cartesian(&self.y, self.t.value())
    }
}

/// Reference values on fixed t and τ grids, gathered while integrating so
/// that long high-precision runs need not keep their dense output.
#[derive(Clone, Debug)]
pub struct ReferenceSamples<S> {
    pub at_time: Vec<Sample<S>>,
    pub at_tau: Vec<Sample<S>>,
    pub stats: Stats,
    pub drift: Drift,
}

/// Integrates from `x0` over `duration` and samples at ascending `times`
/// and ascending `taus`. Grid points not reached are reported as out of span.
pub fn sample_reference<S: Scalar + FromStr>(
    x0: &CartesianState,
    model: &GravityModel,
    duration: f64,
    opts: &ReferenceOptions,
    times: &[f64],
    taus: &[f64],
) -> Result<ReferenceSamples<S>> {
    let sys = MainProblem { model: *model };
    let y0 = initial_state::<S>(x0);
    let mut tracker = DriftTracker::new(&y0, model);
    let t0 = S::cst(x0.t);
    let (mut at_time, mut at_tau) = (
        Vec::with_capacity(times.len()),
        Vec::with_capacity(taus.len()),
    );
    let (mut it, mut itau) = (0usize, 0usize);
    // samples at the very start of the span
    while it < times.len() && times[it] <= x0.t {
        if times[it] < x0.t {
            return Err(Error::OutOfSpan {
                value: times[it],
                start: x0.t,
                end: x0.t + duration,
            });
        }
        at_time.push(Sample { t: t0, y: y0 });
        it += 1;
    }
    while itau < taus.len() && taus[itau] <= 0.0 {
        if taus[itau] < 0.0 {
            return Err(Error::OutOfSpan {
                value: taus[itau],
                start: 0.0,
                end: f64::INFINITY,
            });
        }
        at_tau.push(Sample { t: t0, y: y0 });
        itau += 1;
    }
    let mut tau_end = 0.0;
    let (_, stats) = integrate(&sys, t0, y0, t0 + duration, opts, |step| {
        tracker.update(&step.y_end, model);
        let t_end = step.t_end().value();
        while it < times.len() && times[it] <= t_end {
            let t = S::cst(times[it]);
            at_time.push(Sample { t, y: step.eval(t) });
            it += 1;
        }
        let step_tau_end = step.y_end[TAU].value();
        while itau < taus.len() && taus[itau] <= step_tau_end {
            let (t, y) = invert_tau(step, S::cst(taus[itau]), model);
            at_tau.push(Sample { t, y });
            itau += 1;
        }
        tau_end = step_tau_end;
    })?;
    if it < times.len() {
        return Err(Error::OutOfSpan {
            value: times[it],
            start: x0.t,
            end: x0.t + duration,
        });
    }
    if itau < taus.len() {
        return Err(Error::OutOfSpan {
            value: taus[itau],
            start: 0.0,
            end: tau_end,
        });
    }
    Ok(ReferenceSamples {
        at_time,
        at_tau,
        stats,
        drift: tracker.drift,
    })
}
