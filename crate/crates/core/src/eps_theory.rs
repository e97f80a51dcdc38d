//! Analytic main-problem theory in the extended phase space.
//!
//! The orbit is carried through the Lie-transform chain
//! osculating → prime → mean at the epoch, advanced linearly in the
//! fictitious time τ, and mapped back. Physical time is an output; a
//! Newton iteration on τ evaluates the theory at a prescribed t.

use crate::dd::DoubleDouble;
use crate::dsvars::{
    aux, ds_to_polar, polar_anomaly, polar_to_ds, time_offset_from, Chart, DsState, BIG_G, BIG_H,
    BIG_LAMBDA, BIG_PHI,
};
use crate::elements::{cartesian_to_polar, polar_to_cartesian, CartesianState, GravityModel};
use crate::error::{Error, Result};
use crate::hamiltonians::secular_hamiltonian;
use crate::liealgebra::{
    map_nonsingular, seed, Direction, GeneratorKind, MapOptions, NonsingularPoint,
};

/// Default convergence threshold on |t(τ) − t| for the time inversion (s).
pub const NEWTON_TOLERANCE: f64 = 1e-12;
/// Default iteration cap for the time inversion.
pub const NEWTON_MAX_ITERATIONS: u32 = 10;

/// Position of λ among the non-singular values.
const LAMBDA_SLOT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsOptions {
    /// Truncation order of the transformations, 1 or 2.
    pub order: u32,
    pub map: MapOptions,
    /// Time inversion threshold (s) and iteration cap.
    pub newton_tolerance: f64,
    pub newton_max_iterations: u32,
}

impl Default for EpsOptions {
    fn default() -> Self {
        EpsOptions {
            order: 1,
            map: MapOptions::default(),
            newton_tolerance: NEWTON_TOLERANCE,
            newton_max_iterations: NEWTON_MAX_ITERATIONS,
        }
    }
}

impl EpsOptions {
    pub fn order(order: u32) -> Self {
        EpsOptions {
            order,
            ..Default::default()
        }
    }
}

/// Rates of the mean angles per unit τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequencies {
    pub n_phi: f64,
    pub n_g: f64,
    pub n_h: f64,
    /// dλ/dτ (s per unit τ).
    pub n_lambda: f64,
}

/// Mean elements at the epoch together with their secular rates.
#[derive(Clone, Copy, Debug)]
pub struct MeanEpsState {
    pub model: GravityModel,
    pub options: EpsOptions,
    /// Physical time of τ = 0.
    pub epoch: f64,
    /// Mean non-singular point at τ = 0; its λ slot is zero.
    pub mean: NonsingularPoint,
    /// Mean time element at τ = 0.
    pub lambda: DoubleDouble,
    pub frequencies: Frequencies,
}

/// Theory output at one τ.
#[derive(Clone, Copy, Debug)]
pub struct Ephemeris {
    pub state: CartesianState,
    pub osculating: DsState,
    pub tau: DoubleDouble,
    /// Physical time in double-double; `state.t` is its rounding.
    pub t: DoubleDouble,
    /// Newton updates used by [`MeanEpsState::ephemeris_at_time`]; zero otherwise.
    pub iterations: u32,
}

fn offset_of(p: &NonsingularPoint, model: &GravityModel) -> f64 {
    time_offset_from(p.true_anomaly(), p.eccentricity(), p.big_lambda, model)
}

/// Maps osculating initial conditions to mean elements and computes the
/// secular frequencies.
pub fn initialize(
    x0: &CartesianState,
    model: &GravityModel,
    options: EpsOptions,
) -> Result<MeanEpsState> {
    if !(1..=2).contains(&options.order) {
        return Err(Error::Config(format!(
            "theory order {} not in 1..=2",
            options.order
        )));
    }
    if !(options.newton_tolerance > 0.0) || options.newton_max_iterations == 0 {
        return Err(Error::Config(
            "Newton tolerance and iteration cap must be positive".into(),
        ));
    }
    let polar = cartesian_to_polar(x0)?;
    let q = -x0.hamiltonian(model);
    polar_to_ds(&polar, q, model)?.validate(model)?;
    let (phi, e) = polar_anomaly(&polar, model)?;
    let (sg, cg) = (polar.theta - phi).sin_cos();
    let osc = NonsingularPoint {
        values: [
            polar.theta,
            e * cg,
            e * sg,
            polar.node,
            0.0,
            polar.big_theta,
        ],
        big_h: polar.n,
        big_lambda: q,
    };
    let lambda = DoubleDouble::from_f64(x0.t) - time_offset_from(phi, e, q, model);

    let (order, opts) = (options.order, options.map);
    let prime = map_nonsingular(
        &osc,
        GeneratorKind::ShortPeriod,
        Direction::Inverse,
        order,
        model,
        opts,
    )?;
    let mut mean = map_nonsingular(
        &prime,
        GeneratorKind::LongPeriod,
        Direction::Inverse,
        order,
        model,
        opts,
    )?;
    let lambda = lambda + mean.values[LAMBDA_SLOT];
    mean.values[LAMBDA_SLOT] = 0.0;

    let grad = secular_hamiltonian(&seed(&mean.canonical(model)), model, order + 1)?.grad;
    let frequencies = Frequencies {
        n_phi: grad[BIG_PHI],
        n_g: grad[BIG_G],
        n_h: grad[BIG_H],
        n_lambda: grad[BIG_LAMBDA],
    };
    Ok(MeanEpsState {
        model: *model,
        options,
        epoch: x0.t,
        mean,
        lambda,
        frequencies,
    })
}

impl MeanEpsState {
    /// Mean point at τ (λ slot zero) and the mean time element.
    pub fn propagate_mean(&self, tau: DoubleDouble) -> (NonsingularPoint, DoubleDouble) {
        let f = &self.frequencies;
        let t = tau.to_f64();
        let (sw, cw) = (f.n_g * t).sin_cos();
        let [theta, c, s, h, _, big_g] = self.mean.values;
        let point = NonsingularPoint {
            values: [
                theta + (f.n_phi + f.n_g) * t,
                c * cw - s * sw,
                c * sw + s * cw,
                h + f.n_h * t,
                0.0,
                big_g,
            ],
            ..self.mean
        };
        (point, self.lambda + tau * f.n_lambda)
    }

    /// Osculating point at τ (λ slot zero), its time element and the time
    /// offset t − λ.
    pub fn osculating_point(
        &self,
        tau: DoubleDouble,
    ) -> Result<(NonsingularPoint, DoubleDouble, f64)> {
        let (mean, lambda) = self.propagate_mean(tau);
        let (order, opts, model) = (self.options.order, self.options.map, &self.model);
        let prime = map_nonsingular(
            &mean,
            GeneratorKind::LongPeriod,
            Direction::Direct,
            order,
            model,
            opts,
        )?;
        let mut osc = map_nonsingular(
            &prime,
            GeneratorKind::ShortPeriod,
            Direction::Direct,
            order,
            model,
            opts,
        )?;
        let lambda = lambda + osc.values[LAMBDA_SLOT];
        osc.values[LAMBDA_SLOT] = 0.0;
        Ok((osc, lambda, offset_of(&osc, model)))
    }

    /// Physical time reached at τ, in double-double.
    pub fn time_at_tau(&self, tau: DoubleDouble) -> Result<DoubleDouble> {
        let (_, lambda, offset) = self.osculating_point(tau)?;
        Ok(lambda + offset)
    }

    pub fn osculating_at_tau(&self, tau: f64) -> Result<Ephemeris> {
        self.ephemeris(DoubleDouble::from_f64(tau), 0)
    }

    fn ephemeris(&self, tau: DoubleDouble, iterations: u32) -> Result<Ephemeris> {
        let (osc, lambda, offset) = self.osculating_point(tau)?;
        let t = lambda + offset;
        let mut ds = DsState::from_array(osc.canonical(&self.model), Chart::Osculating);
        ds.lambda = lambda.to_f64();
        let polar = ds_to_polar(&ds, &self.model)?;
        let state = polar_to_cartesian(&polar).with_epoch(t.to_f64());
        Ok(Ephemeris {
            state,
            osculating: ds,
            tau,
            t,
            iterations,
        })
    }

    /// dt/dτ = r²/Γ at a point.
    fn time_rate(&self, p: &NonsingularPoint) -> f64 {
        let a = aux(&p.canonical(&self.model), &self.model);
        let r = a.p / (1.0 + p.eccentricity() * p.true_anomaly().cos());
        r * r / a.gamma
    }

    /// Time equation of the mean orbit, and its τ-derivative.
    fn mean_time(&self, tau: DoubleDouble) -> (DoubleDouble, f64) {
        let (mean, lambda) = self.propagate_mean(tau);
        (
            lambda + offset_of(&mean, &self.model),
            self.time_rate(&mean),
        )
    }

    /// Initial τ for the time inversion: Kepler time of flight along the mean orbit.
    pub fn initial_tau(&self, t: f64) -> DoubleDouble {
        let target = DoubleDouble::from_f64(t);
        let mut tau = DoubleDouble::from_f64((t - self.epoch) / self.frequencies.n_lambda);
        for _ in 0..8 {
            let (tm, slope) = self.mean_time(tau);
            let step = (tm - target).to_f64() / slope;
            tau -= DoubleDouble::from_f64(step);
            if step.abs() * slope < 1e-6 {
                break;
            }
        }
        tau
    }

    /// Theory evaluated at physical time `t`, by Newton iteration on τ with
    /// dt/dτ = r²/Γ.
    pub fn ephemeris_at_time(&self, t: f64) -> Result<Ephemeris> {
        let target = DoubleDouble::from_f64(t);
        let mut tau = self.initial_tau(t);
        let mut residual = f64::INFINITY;
        let (tolerance, cap) = (
            self.options.newton_tolerance,
            self.options.newton_max_iterations,
        );
        for k in 0..=cap {
            let (osc, lambda, offset) = self.osculating_point(tau)?;
            residual = (lambda + offset - target).to_f64();
            if residual.abs() < tolerance {
                return self.ephemeris(tau, k);
            }
            if k == cap {
                break;
            }
            tau -= DoubleDouble::from_f64(residual / self.time_rate(&osc));
        }
        Err(Error::NoConvergence {
            what: "time inversion",
            iterations: cap as usize,
            residual,
        })
    }

    /// t_theory(τ) − t_reference, formed in double-double.
    pub fn timing_error(&self, tau: DoubleDouble, t_reference: DoubleDouble) -> Result<f64> {
        Ok((self.time_at_tau(tau)? - t_reference).to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{rsw_errors, ClassicalElements};

    fn prisma_x0(model: &GravityModel) -> CartesianState {
        ClassicalElements::prisma().to_cartesian(model).unwrap()
    }

    #[test]
    fn epoch_is_reproduced() {
        let model = GravityModel::default();
        let x0 = prisma_x0(&model);
        for order in 1..=2 {
            let theory = initialize(&x0, &model, EpsOptions::order(order)).unwrap();
            let eph = theory.osculating_at_tau(0.0).unwrap();
            let err = rsw_errors(&x0, &eph.state.with_epoch(x0.t)).unwrap();
            // round trip of a truncated transform: O(J2^{order+1}) relative
            let scale = model.j2.powi(order as i32 + 1);
            assert!(err.rss < 5.0 * scale * 6878.0, "order {order}: {err:?}");
            assert!(
                eph.t.to_f64().abs() < 5.0 * scale * 5700.0,
                "order {order}: t = {}",
                eph.t
            );
        }
    }

    #[test]
    fn kepler_limit_frequencies() {
        let model = GravityModel::default().kepler();
        let x0 = prisma_x0(&model);
        let theory = initialize(&x0, &model, EpsOptions::default()).unwrap();
        let f = theory.frequencies;
        assert!((f.n_phi - 1.0).abs() < 1e-15);
        assert_eq!(f.n_g, 0.0);
        assert_eq!(f.n_h, 0.0);
        let q = theory.mean.big_lambda;
        assert!((f.n_lambda - model.mu / (2.0 * q).powf(1.5)).abs() < 1e-12 * f.n_lambda);
    }

    #[test]
    fn kepler_limit_matches_two_body_motion() {
        let model = GravityModel::default().kepler();
        let x0 = prisma_x0(&model);
        let theory = initialize(&x0, &model, EpsOptions::order(2)).unwrap();
        let coe = ClassicalElements::prisma();
        let n = (model.mu / coe.a.powi(3)).sqrt();
        for t in [0.0, 1234.5, 86400.0] {
            let eph = theory.ephemeris_at_time(t).unwrap();
            let expected = ClassicalElements {
                mean_anomaly: coe.mean_anomaly + n * t,
                ..coe
            }
            .to_cartesian(&model)
            .unwrap()
            .with_epoch(t);
            let err = rsw_errors(&expected, &eph.state).unwrap();
            assert!(err.rss < 1e-8, "t={t}: {err:?}");
        }
    }

    #[test]
    fn secular_rates_have_the_classical_signs() {
        let model = GravityModel::default();
        let theory = initialize(&prisma_x0(&model), &model, EpsOptions::default()).unwrap();
        let f = theory.frequencies;
        // retrograde sun-synchronous-like inclination: node advances, perigee regresses
        assert!(f.n_h > 0.0 && f.n_g < 0.0, "{f:?}");
        assert!((f.n_phi - 1.0).abs() < 1e-3);
    }

    #[test]
    fn time_inversion_converges() {
        let model = GravityModel::default();
        let theory = initialize(&prisma_x0(&model), &model, EpsOptions::order(2)).unwrap();
        for t in [0.0, 60.0, 3600.0, 86_400.0, 864_000.0] {
            let eph = theory.ephemeris_at_time(t).unwrap();
            assert!(eph.iterations <= NEWTON_MAX_ITERATIONS);
            assert!((eph.t - DoubleDouble::from_f64(t)).to_f64().abs() < NEWTON_TOLERANCE);
        }
    }

    #[test]
    fn time_inversion_converges_on_a_dense_grid() {
        let model = GravityModel::default();
        let x0 = prisma_x0(&model);
        for order in 1..=2 {
            let theory = initialize(&x0, &model, EpsOptions::order(order)).unwrap();
            for k in 0..400 {
                let t = k as f64 * 217.3;
                let eph = theory.ephemeris_at_time(t).unwrap();
                assert!(
                    eph.iterations <= 3,
                    "order {order}, t={t}: {} iterations",
                    eph.iterations
                );
            }
        }
    }

    #[test]
    fn critical_inclination_is_rejected() {
        let model = GravityModel::default();
        let coe = ClassicalElements {
            inc: (1.0f64 / 5.0).sqrt().acos(),
            ..ClassicalElements::prisma()
        };
        let x0 = coe.to_cartesian(&model).unwrap();
        assert!(matches!(
            initialize(&x0, &model, EpsOptions::default()),
            Err(Error::CriticalInclination { .. })
        ));
    }

    #[test]
    fn invalid_order_is_a_config_error() {
        let model = GravityModel::default();
        assert!(matches!(
            initialize(&prisma_x0(&model), &model, EpsOptions::order(3)),
            Err(Error::Config(_))
        ));
    }
}
