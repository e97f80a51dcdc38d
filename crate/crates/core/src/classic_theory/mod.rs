//! Physical-time comparison theory: Brouwer-type first-order periodic
//! corrections, second-order secular rates and energy calibration of the
//! mean semimajor axis.
//!
//! The theory is a Lie transform in Delaunay variables (ℓ, g, h, L, G, H)
//! with H₀ = −μ²/(2L²). Corrections are formed as brackets over the same
//! second-order jets used by the extended-phase-space theory; the Delaunay
//! chart occupies jet slots 0–2 and 4–6.

use std::f64::consts::PI;

use crate::elements::{
    cartesian_to_classical, normalize_angle, CartesianState, ClassicalElements, GravityModel,
};
use crate::error::{Error, Result};
use crate::hamiltonians::DELTA_MIN;
use crate::liealgebra::{poisson, seed, Jet2, DIM};
use crate::scalar::Scalar;

/// Jet slots of the Delaunay chart.
pub const MEAN_ANOMALY: usize = 0;
pub const PERIGEE: usize = 1;
pub const NODE: usize = 2;
pub const BIG_L: usize = 4;
pub const BIG_G: usize = 5;
pub const BIG_H: usize = 6;

/// Energy residual accepted by the calibration, relative to |E|.
pub const CALIBRATION_TOLERANCE: f64 = 1e-13;
const CALIBRATION_MAX_ITERATIONS: usize = 20;

/// Solves E − e sin E = M for the eccentric anomaly.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> f64 {
    let m = normalize_angle(mean_anomaly);
    if e == 0.0 {
        return mean_anomaly;
    }
    let mut ecc = if e < 0.8 {
        m + e * m.sin()
    } else {
        PI.copysign(m)
    };
    for _ in 0..50 {
        let f = ecc - e * ecc.sin() - m;
        let step = f / (1.0 - e * ecc.cos());
        ecc -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    ecc + (mean_anomaly - m)
}

/// True anomaly from the mean anomaly, continuous in M.
pub fn true_anomaly(mean_anomaly: f64, e: f64) -> f64 {
    let ecc = solve_kepler(mean_anomaly, e);
    let beta = e / (1.0 + (1.0 - e * e).sqrt());
    ecc + 2.0 * (beta * ecc.sin()).atan2(1.0 - beta * ecc.cos())
}

/// Eccentric and true anomaly over any scalar: the double solution is
/// refined by Newton steps in `S` so that derivatives propagate.
fn anomalies<S: Scalar>(mean_anomaly: S, e: S) -> (S, S) {
    let mut ecc = mean_anomaly.with_value(solve_kepler(mean_anomaly.value(), e.value()));
    for _ in 0..3 {
        let (s, c) = ecc.sin_cos();
        ecc = ecc - (ecc - e * s - mean_anomaly) / (-(e * c) + 1.0);
    }
    let beta = e / ((-e.sq() + 1.0).sqrt() + 1.0);
    let (s, c) = ecc.sin_cos();
    (ecc, ecc + (beta * s).atan2(-(beta * c) + 1.0) * 2.0)
}

fn eccentricity<S: Scalar>(x: &[S; DIM]) -> S {
    let e2 = -(x[BIG_G] / x[BIG_L]).sq() + 1.0;
    if e2.value() > 0.0 {
        e2.sqrt()
    } else {
        S::cst(0.0)
    }
}

/// Keplerian part −μ²/(2L²).
pub fn kepler_energy<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> S {
    -(x[BIG_L].sq().recip() * (0.5 * model.mu * model.mu))
}

/// J2 part of the Hamiltonian per unit J2: (μR⊕²/r³)P₂(sin β).
pub fn zonal_term<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> S {
    let e = eccentricity(x);
    let (ecc, f) = anomalies(x[MEAN_ANOMALY], e);
    let a = x[BIG_L].sq() / model.mu;
    let r = a * (-(e * ecc.cos()) + 1.0);
    let s2 = -(x[BIG_H] / x[BIG_G]).sq() + 1.0;
    let sin_lat2 = s2 * (f + x[PERIGEE]).sin().sq();
    r.powi(3).recip() * (sin_lat2 * 3.0 - 1.0) * (0.5 * model.mu * model.re * model.re)
}

/// First-order secular term, μ⁴R⊕²(1 − 3θ²)/(4L³G³) with θ = H/G.
pub fn secular_first<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> S {
    let (l, g) = (x[BIG_L], x[BIG_G]);
    let c2 = (x[BIG_H] / g).sq();
    (-(c2 * 3.0) + 1.0) / (l.powi(3) * g.powi(3)) * (0.25 * model.mu.powi(4) * model.re * model.re)
}

/// Second-order secular term, the potential of the second-order Brouwer
/// secular rates.
pub fn secular_second<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> S {
    let (l, g, h) = (x[BIG_L], x[BIG_G], x[BIG_H]);
    let (g2, h2, l2) = (g.sq(), h.sq(), l.sq());
    let poly = g2.powi(3) * 5.0 + g2.sq() * g * l * 4.0
        - g2.sq() * h2 * 18.0
        - g2.sq() * l2 * 5.0
        - g2 * g * h2 * l * 24.0
        + g2 * h2.sq() * 5.0
        + g2 * h2 * l2 * 10.0
        + g * h2.sq() * l * 36.0
        + h2.sq() * l2 * 35.0;
    -(poly / (g.powi(11) * l.powi(5))) * (3.0 / 128.0 * model.mu.powi(6) * model.re.powi(4))
}

/// Mean Hamiltonian through J2^order.
pub fn secular_hamiltonian<S: Scalar>(x: &[S; DIM], model: &GravityModel, order: u32) -> S {
    let mut k = kepler_energy(x, model);
    if order >= 1 {
        k = k + secular_first(x, model) * model.j2;
    }
    if order >= 2 {
        k = k + secular_second(x, model) * (model.j2 * model.j2);
    }
    k
}

/// Short-period generator, the solution of n ∂W₁/∂ℓ = (zonal term) − (its ℓ-average).
pub fn short_period_generator<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> S {
    let e = eccentricity(x);
    let (_, f) = anomalies(x[MEAN_ANOMALY], e);
    let g = x[PERIGEE];
    let c2 = (x[BIG_H] / x[BIG_G]).sq();
    let s2 = -c2 + 1.0;
    let g2 = g * 2.0;
    let center = (f - x[MEAN_ANOMALY] + e * f.sin()) * (-(c2 * 3.0) + 1.0) * 0.25;
    let harmonics = (f * 2.0 + g2).sin() * 0.5
        + e * (f * 3.0 + g2).sin() * (1.0 / 6.0)
        + e * (f + g2).sin() * 0.5;
    (center - s2 * harmonics * 0.75) / x[BIG_G].powi(3)
        * (model.mu * model.mu * model.re * model.re)
}

/// Long-period generator, removing the sin 2g terms left at second order
/// by the short-period elimination.
pub fn long_period_generator<S: Scalar>(x: &[S; DIM], model: &GravityModel) -> Result<S> {
    let c2 = (x[BIG_H] / x[BIG_G]).sq();
    let s2 = -c2 + 1.0;
    let divisor = -(c2 * 5.0) + 1.0;
    check_critical(divisor)?;
    let e2 = -(x[BIG_G] / x[BIG_L]).sq() + 1.0;
    let shape = e2 * s2 * (-(c2 * 15.0) + 1.0) / divisor;
    Ok(shape * (x[PERIGEE] * 2.0).sin() / x[BIG_G].powi(3)
        * (model.mu * model.mu * model.re * model.re / 32.0))
}

fn check_critical<S: Scalar>(divisor: S) -> Result<()> {
    // same threshold as the extended-phase-space divisor 3(1 − 5 cos² I)
    let scaled = divisor.value() * 3.0;
    if scaled.abs() < DELTA_MIN {
        Err(Error::CriticalInclination { divisor: scaled })
    } else {
        Ok(())
    }
}

/// A point in (ℓ + g, e cos g, e sin g, h, L, G) with H.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaunayPoint {
    pub values: [f64; 6],
    pub big_h: f64,
}

impl DelaunayPoint {
    pub fn from_elements(coe: &ClassicalElements, model: &GravityModel) -> Self {
        let l = (model.mu * coe.a).sqrt();
        let g = l * (1.0 - coe.e * coe.e).sqrt();
        let (sw, cw) = coe.argp.sin_cos();
        DelaunayPoint {
            values: [
                coe.mean_anomaly + coe.argp,
                coe.e * cw,
                coe.e * sw,
                coe.raan,
                l,
                g,
            ],
            big_h: g * coe.inc.cos(),
        }
    }

    pub fn eccentricity(&self) -> f64 {
        self.values[1].hypot(self.values[2])
    }

    fn perigee(&self) -> f64 {
        let [_, c, s, ..] = self.values;
        if c == 0.0 && s == 0.0 {
            0.0
        } else {
            s.atan2(c)
        }
    }

    /// Delaunay chart in jet slot order. Slots 3 and 7 are unused.
    pub fn chart(&self) -> [f64; DIM] {
        let g = self.perigee();
        let [theta, _, _, h, l, big_g] = self.values;
        [theta - g, g, h, 0.0, l, big_g, self.big_h, 0.0]
    }

    pub fn elements(&self, model: &GravityModel) -> Result<ClassicalElements> {
        let g = self.perigee();
        let [theta, _, _, h, l, big_g] = self.values;
        let coe = ClassicalElements {
            a: l * l / model.mu,
            e: self.eccentricity(),
            inc: (self.big_h / big_g).clamp(-1.0, 1.0).acos(),
            raan: h,
            argp: g,
            mean_anomaly: theta - g,
        };
        coe.validate()?;
        Ok(coe)
    }

    pub fn to_cartesian(&self, model: &GravityModel, t: f64) -> Result<CartesianState> {
        Ok(self.elements(model)?.to_cartesian(model)?.with_epoch(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    ShortPeriod,
    LongPeriod,
}

/// Applies a first-order correction: `sign` = +1 toward the osculating
/// side, −1 toward the mean side.
pub fn correct(
    p: &DelaunayPoint,
    kind: Correction,
    sign: f64,
    model: &GravityModel,
) -> Result<DelaunayPoint> {
    let x = seed(&p.chart());
    let w: Jet2 = match kind {
        Correction::ShortPeriod => short_period_generator(&x, model),
        Correction::LongPeriod => long_period_generator(&x, model)?,
    };
    let e = eccentricity(&x);
    let (sg, cg) = x[PERIGEE].sin_cos();
    let xi = [
        x[MEAN_ANOMALY] + x[PERIGEE],
        e * cg,
        e * sg,
        x[NODE],
        x[BIG_L],
        x[BIG_G],
    ];
    let mut out = *p;
    for (v, f) in out.values.iter_mut().zip(&xi) {
        *v += sign * model.j2 * poisson(f, &w);
    }
    Ok(out)
}

/// Outcome of the energy calibration of the mean semimajor axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyCalibration {
    /// Osculating energy of the initial state (km²/s²).
    pub energy: f64,
    /// Mean semimajor axis before and after calibration (km).
    pub a_uncalibrated: f64,
    pub a: f64,
    /// Mean Hamiltonian minus energy at the calibrated point (km²/s²).
    pub residual: f64,
    pub iterations: usize,
}

/// Secular rates of the mean angles (rad/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecularRates {
    pub mean_anomaly: f64,
    pub perigee: f64,
    pub node: f64,
}

/// Mean elements at the epoch together with their secular rates.
#[derive(Clone, Copy, Debug)]
pub struct MeanClassicState {
    pub model: GravityModel,
    pub epoch: f64,
    pub mean: DelaunayPoint,
    pub rates: SecularRates,
    pub calibration: Option<EnergyCalibration>,
}

fn secular_rates(p: &DelaunayPoint, model: &GravityModel) -> SecularRates {
    let k = secular_hamiltonian(&seed(&p.chart()), model, 2);
    SecularRates {
        mean_anomaly: k.grad[BIG_L],
        perigee: k.grad[BIG_G],
        node: k.grad[BIG_H],
    }
}

/// Solves mean Hamiltonian = `energy` for L with e and H held fixed.
fn calibrate(
    mean: &DelaunayPoint,
    energy: f64,
    model: &GravityModel,
) -> Result<(DelaunayPoint, EnergyCalibration)> {
    let eta = (1.0 - mean.eccentricity().powi(2)).sqrt();
    let mut p = *mean;
    let mut residual = f64::INFINITY;
    for k in 0..CALIBRATION_MAX_ITERATIONS {
        let jet = secular_hamiltonian(&seed(&p.chart()), model, 2);
        residual = jet.value - energy;
        if residual.abs() < CALIBRATION_TOLERANCE * energy.abs() {
            let calibration = EnergyCalibration {
                energy,
                a_uncalibrated: mean.values[4].powi(2) / model.mu,
                a: p.values[4].powi(2) / model.mu,
                residual,
                iterations: k,
            };
            return Ok((p, calibration));
        }
        // along G = ηL the total derivative is ∂/∂L + η ∂/∂G
        let slope = jet.grad[BIG_L] + eta * jet.grad[BIG_G];
        let l = p.values[4] - residual / slope;
        p.values[4] = l;
        p.values[5] = eta * l;
    }
    Err(Error::NoConvergence {
        what: "energy calibration",
        iterations: CALIBRATION_MAX_ITERATIONS,
        residual,
    })
}

/// Maps osculating initial conditions to mean elements, optionally
/// calibrating the mean semimajor axis on the exact energy.
pub fn initialize_classic(
    x0: &CartesianState,
    model: &GravityModel,
    calibrate_energy: bool,
) -> Result<MeanClassicState> {
    let osc = DelaunayPoint::from_elements(&cartesian_to_classical(x0, model)?, model);
    let prime = correct(&osc, Correction::ShortPeriod, -1.0, model)?;
    let mut mean = correct(&prime, Correction::LongPeriod, -1.0, model)?;
    // keep G consistent with the corrected L and e
    mean.values[5] = mean.values[4] * (1.0 - mean.eccentricity().powi(2)).sqrt();
    let mut calibration = None;
    if calibrate_energy {
        let (p, c) = calibrate(&mean, x0.hamiltonian(model), model)?;
        mean = p;
        calibration = Some(c);
    }
    Ok(MeanClassicState {
        model: *model,
        epoch: x0.t,
        mean,
        rates: secular_rates(&mean, model),
        calibration,
    })
}

impl MeanClassicState {
    pub fn mean_elements(&self) -> Result<ClassicalElements> {
        self.mean.elements(&self.model)
    }

    /// Mean point at physical time t.
    pub fn mean_at(&self, t: f64) -> DelaunayPoint {
        let dt = t - self.epoch;
        let r = &self.rates;
        let (sw, cw) = (r.perigee * dt).sin_cos();
        let [theta, c, s, h, l, g] = self.mean.values;
        DelaunayPoint {
            values: [
                theta + (r.mean_anomaly + r.perigee) * dt,
                c * cw - s * sw,
                c * sw + s * cw,
                h + r.node * dt,
                l,
                g,
            ],
            big_h: self.mean.big_h,
        }
    }

    /// Osculating state at physical time t.
    pub fn propagate(&self, t: f64) -> Result<CartesianState> {
        let mean = self.mean_at(t);
        let prime = correct(&mean, Correction::LongPeriod, 1.0, &self.model)?;
        let osc = correct(&prime, Correction::ShortPeriod, 1.0, &self.model)?;
        osc.to_cartesian(&self.model, t)
    }
}

/// Osculating state of `m` at time t.
pub fn propagate_classic(m: &MeanClassicState, t: f64) -> Result<CartesianState> {
    m.propagate(t)
}
