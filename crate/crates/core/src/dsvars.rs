//! Delaunay-similar canonical chart of the extended phase space.
//!
//! Canonical coordinates are stored in the order (φ, g, h, λ, Φ, G, H, Λ);
//! coordinate `i` is conjugate to momentum `i + 4`.

use std::f64::consts::PI;

use crate::elements::{legendre_p2, normalize_angle, GravityModel, PolarState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const PHI: usize = 0;
pub const G_ANGLE: usize = 1;
pub const H_ANGLE: usize = 2;
pub const LAMBDA: usize = 3;
pub const BIG_PHI: usize = 4;
pub const BIG_G: usize = 5;
pub const BIG_H: usize = 6;
pub const BIG_LAMBDA: usize = 7;

/// Which stage of the Lie-transform chain a canonical point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Osculating,
    Prime,
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DsState {
    /// True anomaly (rad).
    pub phi: f64,
    /// Argument of perigee (rad).
    pub g: f64,
    /// Right ascension of the ascending node (rad).
    pub h: f64,
    /// Time element (s); never wrapped.
    pub lambda: f64,
    pub big_phi: f64,
    pub big_g: f64,
    pub big_h: f64,
    /// Total-energy momentum Q = −𝓗 (km²/s²).
    pub big_lambda: f64,
    pub chart: Chart,
}

impl DsState {
    pub fn from_array(x: [f64; 8], chart: Chart) -> Self {
        DsState {
            phi: x[PHI],
            g: x[G_ANGLE],
            h: x[H_ANGLE],
            lambda: x[LAMBDA],
            big_phi: x[BIG_PHI],
            big_g: x[BIG_G],
            big_h: x[BIG_H],
            big_lambda: x[BIG_LAMBDA],
            chart,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.phi,
            self.g,
            self.h,
            self.lambda,
            self.big_phi,
            self.big_g,
            self.big_h,
            self.big_lambda,
        ]
    }

    pub fn aux(&self, model: &GravityModel) -> Aux<f64> {
        aux(&self.to_array(), model)
    }

    pub fn validate(&self, model: &GravityModel) -> Result<()> {
        if !(self.big_lambda > 0.0) {
            return Err(Error::UnboundOrbit {
                energy: -self.big_lambda,
            });
        }
        if !(self.big_g > 0.0) || self.big_h.abs() > self.big_g {
            return Err(Error::InvalidElements(format!(
                "momenta G={} H={} violate G > 0, |H| ≤ G",
                self.big_g, self.big_h
            )));
        }
        let a = self.aux(model);
        if !(a.e2 < 1.0) {
            return Err(Error::InconsistentChart(format!(
                "eccentricity² = {}",
                a.e2
            )));
        }
        Ok(())
    }
}

/// Auxiliary functions of a canonical point.
#[derive(Clone, Copy, Debug)]
pub struct Aux<S> {
    pub gamma: S,
    pub rho: S,
    pub p: S,
    pub e2: S,
    pub e: S,
    /// sin² I.
    pub s2: S,
    pub delta: S,
    pub upsilon: S,
    pub big_delta: S,
}

impl<S: Scalar> Aux<S> {
    pub fn cos2_inclination(&self) -> S {
        -self.s2 + 1.0
    }
}

/// Γ in the DS chart.
pub fn gamma_ds<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    let kepler = (x[BIG_LAMBDA] * 2.0).sqrt().recip() * model.mu;
    x[BIG_G] - (x[BIG_PHI] - kepler) * 0.5
}

pub fn aux<S: Scalar>(x: &[S; 8], model: &GravityModel) -> Aux<S> {
    aux_with_gap(x, x[BIG_PHI] - x[BIG_G], model)
}

/// [`aux`] with Φ − G supplied separately. When Φ is a large number built
/// from G and a small gap, the rounded Φ alone leaves e with about ten
/// digits; passing the gap keeps them all.
pub fn aux_with_gap<S: Scalar>(x: &[S; 8], gap: S, model: &GravityModel) -> Aux<S> {
    let kepler = (x[BIG_LAMBDA] * 2.0).sqrt().recip() * model.mu;
    let big_g = x[BIG_G];
    // Γ − G, formed without cancellation
    let excess = -(gap + big_g - kepler) * 0.5;
    let gamma = big_g + excess;
    let root = gamma * 2.0 - big_g;
    let p = root.sq() / model.mu;
    // 1 − 2Λp/μ = 1 − (1 − κ)² with κ = √(2Λ)(Φ − G)/μ, exact for nearby Φ and G
    let kappa = gap / kepler;
    let e2 = kappa * (-kappa + 2.0);
    let e = if e2.value() > 0.0 {
        e2.sqrt()
    } else {
        S::cst(0.0)
    };
    let s2 = -(x[BIG_H] / big_g).sq() + 1.0;
    let rho = gamma * root / model.mu;
    // δ = Γ/G − 1 and υ = ρ/p − 1 = Γ/(2Γ − G) − 1
    let delta = excess / big_g;
    let upsilon = -(excess / root);
    let big_delta =
        (s2 * 5.0 - 4.0) * 3.0 + (s2 - 1.0) * delta * 6.0 + (s2 * 3.0 - 2.0) * upsilon * 2.0;
    Aux {
        gamma,
        rho,
        p,
        e2,
        e,
        s2,
        delta,
        upsilon,
        big_delta,
    }
}

/// u − φ, the eccentric minus true anomaly, continuous in φ.
pub fn eccentric_minus_true<S: Scalar>(phi: S, e: S) -> S {
    let beta = e / ((-e.sq() + 1.0).sqrt() + 1.0);
    let (s, c) = phi.sin_cos();
    -((beta * s) / (beta * c + 1.0)).atan() * 2.0
}

/// Time offset t − λ = μ(2Λ)^{−3/2}(u − e sin u − φ).
pub fn time_offset<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    let a = aux(x, model);
    time_offset_from(x[PHI], a.e, x[BIG_LAMBDA], model)
}

/// Time offset from the true anomaly and an eccentricity obtained elsewhere.
///
/// The eccentricity inside the canonical chart comes from Φ − G and carries
/// a relative error of order ulp/e²; callers holding e from C, S or from
/// position and velocity should pass it here.
pub fn time_offset_from<S: Scalar>(phi: S, e: S, big_lambda: S, model: &GravityModel) -> S {
    let du = eccentric_minus_true(phi, e);
    let u = phi + du;
    let rate = (big_lambda * 2.0).powi(3).sqrt().recip() * model.mu;
    rate * (du - e * u.sin())
}

/// The Hamiltonian in DS variables (vanishes on physical orbits).
pub fn hamiltonian_ds<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    let a = aux(x, model);
    let r = a.p / (a.e * x[PHI].cos() + 1.0);
    let kepler = (x[BIG_LAMBDA] * 2.0).sqrt().recip() * model.mu;
    let bracket = -(a.s2 * 3.0) + 2.0 + a.s2 * ((x[G_ANGLE] + x[PHI]) * 2.0).cos() * 3.0;
    x[BIG_PHI]
        - kepler
        - (r * a.gamma).recip() * bracket * (model.j2 * model.mu * model.re * model.re * 0.25)
}

/// Γ from polar variables.
pub fn gamma_polar(p: &PolarState, model: &GravityModel) -> Result<f64> {
    let sin_lat = p.sin_inclination() * p.theta.sin();
    let radicand = 1.0
        + 2.0
            * model.j2
            * (model.mu / p.r)
            * (model.re * model.re / (p.big_theta * p.big_theta))
            * legendre_p2(sin_lat);
    if !(radicand > 0.0) {
        return Err(Error::DegenerateState(format!(
            "negative radicand {radicand} in Γ"
        )));
    }
    Ok(0.5 * p.big_theta * (1.0 + radicand.sqrt()))
}

/// Forward chart map, polar variables and Q to DS variables.
pub fn polar_to_ds(p: &PolarState, q: f64, model: &GravityModel) -> Result<DsState> {
    if !(q > 0.0) {
        return Err(Error::UnboundOrbit { energy: -q });
    }
    let gamma = gamma_polar(p, model)?;
    let big_theta = p.big_theta;
    let big_phi = 2.0 * (big_theta - gamma) + model.mu / (2.0 * q).sqrt();
    let semilatus = (2.0 * gamma - big_theta).powi(2) / model.mu;
    let e2 = 1.0 - 2.0 * q * semilatus / model.mu;
    if e2 < -1e-12 {
        return Err(Error::InconsistentChart(format!("1 − 2Qp/μ = {e2} < 0")));
    }
    let (phi, e) = anomaly_from_semilatus(p, semilatus, model);
    let mut ds = DsState {
        phi,
        g: normalize_angle(p.theta - phi),
        h: normalize_angle(p.node),
        lambda: 0.0,
        big_phi,
        big_g: big_theta,
        big_h: p.n,
        big_lambda: q,
        chart: Chart::Osculating,
    };
    ds.lambda = p.t - time_offset_from(phi, e, q, model);
    Ok(ds)
}

fn anomaly_from_semilatus(p: &PolarState, semilatus: f64, model: &GravityModel) -> (f64, f64) {
    let e_cos = semilatus / p.r - 1.0;
    let e_sin = p.big_r * (semilatus / model.mu).sqrt();
    (e_sin.atan2(e_cos), e_cos.hypot(e_sin))
}

/// True anomaly and eccentricity of the osculating DS orbit, straight from
/// polar variables (no cancellation in e).
pub fn polar_anomaly(p: &PolarState, model: &GravityModel) -> Result<(f64, f64)> {
    let gamma = gamma_polar(p, model)?;
    let semilatus = (2.0 * gamma - p.big_theta).powi(2) / model.mu;
    Ok(anomaly_from_semilatus(p, semilatus, model))
}

/// Inverse chart map, including recovery of the physical time from λ.
pub fn ds_to_polar(ds: &DsState, model: &GravityModel) -> Result<PolarState> {
    let x = ds.to_array();
    let a = aux(&x, model);
    if a.e2 < -1e-12 {
        return Err(Error::InconsistentChart(format!(
            "1 − 2Λp/μ = {} < 0",
            a.e2
        )));
    }
    let denom = 1.0 + a.e * ds.phi.cos();
    if !(denom > 0.0) {
        return Err(Error::InconsistentChart(format!("1 + e cos φ = {denom}")));
    }
    Ok(PolarState {
        r: a.p / denom,
        big_r: a.e * ds.phi.sin() * (model.mu / a.p).sqrt(),
        theta: normalize_angle(ds.phi + ds.g),
        big_theta: ds.big_g,
        n: ds.big_h,
        node: normalize_angle(ds.h),
        t: ds.lambda + time_offset(&x, model),
    })
}

/// (θ, C, S, h) with θ = φ + g, C = e cos g, S = e sin g.
pub fn nonsingular_of(ds: &DsState, model: &GravityModel) -> (f64, f64, f64, f64) {
    let a = ds.aux(model);
    (
        normalize_angle(ds.phi + ds.g),
        a.e * ds.g.cos(),
        a.e * ds.g.sin(),
        ds.h,
    )
}

/// Canonical point from the non-singular set and the momenta G, H, Λ.
///
/// Φ follows from the eccentricity through p = μ(1 − e²)/(2Λ) and Γ = (G + √(μp))/2.
#[allow(clippy::too_many_arguments)]
pub fn canonical_from_nonsingular<S: Scalar>(
    theta: S,
    c: S,
    s: S,
    h: S,
    lambda: S,
    big_g: S,
    big_h: S,
    big_lambda: S,
    model: &GravityModel,
) -> [S; 8] {
    let e2 = c.sq() + s.sq();
    let g = if e2.value() > 0.0 {
        s.atan2(c)
    } else {
        S::cst(0.0)
    };
    let semilatus = (-e2 + 1.0) * model.mu / (big_lambda * 2.0);
    let gamma = (big_g + (semilatus * model.mu).sqrt()) * 0.5;
    let big_phi = (big_g - gamma) * 2.0 + (big_lambda * 2.0).sqrt().recip() * model.mu;
    [theta - g, g, h, lambda, big_phi, big_g, big_h, big_lambda]
}

/// Wraps `angle` to the branch nearest `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    angle + 2.0 * PI * ((reference - angle) / (2.0 * PI)).round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{cartesian_to_polar, ClassicalElements};

    fn prisma_ds(model: &GravityModel) -> (PolarState, DsState) {
        let x0 = ClassicalElements::prisma().to_cartesian(model).unwrap();
        let p = cartesian_to_polar(&x0).unwrap();
        let q = -x0.hamiltonian(model);
        (p, polar_to_ds(&p, q, model).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn kepler_gamma_is_theta() {
        let model = GravityModel::default().kepler();
        let (p, _) = prisma_ds(&model);
        assert_eq!(gamma_polar(&p, &model).unwrap(), p.big_theta);
    }

    #[test]
    fn equatorial_gamma_closed_form() {
        let model = GravityModel::default();
        let p = PolarState {
            r: 7000.0,
            big_r: 0.1,
            theta: 1.0,
            big_theta: 52_000.0,
            n: 52_000.0,
            node: 0.0,
            t: 0.0,
        };
        let expected = 0.5
            * p.big_theta
            * (1.0
                + (1.0
                    - model.j2 * model.mu * model.re * model.re
                        / (p.r * p.big_theta * p.big_theta))
                    .sqrt());
        assert!(rel(gamma_polar(&p, &model).unwrap(), expected) < 1e-15);
    }

    #[test]
    fn prisma_gamma_is_order_j2() {
        let model = GravityModel::default();
        let (p, _) = prisma_ds(&model);
        let gamma = gamma_polar(&p, &model).unwrap();
        assert!((gamma / p.big_theta - 1.0).abs() < 10.0 * model.j2);
        assert!((gamma / p.big_theta - 1.0).abs() > 0.0);
    }

    #[test]
    fn polar_round_trip() {
        let model = GravityModel::default();
        let (p, ds) = prisma_ds(&model);
        let back = ds_to_polar(&ds, &model).unwrap();
        assert!(rel(back.r, p.r) < 1e-11);
        let speed = p.big_theta / p.r;
        assert!((back.big_r - p.big_r).abs() < 1e-11 * speed);
        assert!((back.theta - p.theta).abs() < 1e-11);
        assert!(rel(back.big_theta, p.big_theta) < 1e-11);
        assert!(rel(back.n, p.n) < 1e-11);
        assert!((back.t - p.t).abs() < 1e-9);
    }

    #[test]
    fn gamma_charts_agree() {
        let model = GravityModel::default();
        let (p, ds) = prisma_ds(&model);
        let a = ds.aux(&model);
        assert!(rel(a.gamma, gamma_polar(&p, &model).unwrap()) < 1e-14);
    }

    #[test]
    fn hamiltonian_constraint_vanishes() {
        let model = GravityModel::default();
        let (_, ds) = prisma_ds(&model);
        let scale = model.mu / (2.0 * ds.big_lambda).sqrt();
        let f = hamiltonian_ds(&ds.to_array(), &model);
        assert!(f.abs() < 1e-9 * scale, "F = {f}");
    }

    #[test]
    fn circular_kepler_orbit() {
        let model = GravityModel::default().kepler();
        let coe = ClassicalElements {
            e: 0.0,
            ..ClassicalElements::prisma()
        };
        let x0 = coe.to_cartesian(&model).unwrap().with_epoch(123.0);
        let p = cartesian_to_polar(&x0).unwrap();
        let q = -x0.hamiltonian(&model);
        let ds = polar_to_ds(&p, q, &model).unwrap();
        let a = ds.aux(&model);
        assert!(a.e < 1e-7);
        assert!(rel(ds.big_phi, model.mu / (2.0 * q).sqrt()) < 1e-14);
        // the residual eccentricity is round-off noise; λ − t is bounded by it
        let period_scale = model.mu / (2.0 * q).powf(1.5);
        assert!((ds.lambda - 123.0).abs() <= 2.5 * a.e * period_scale + 1e-12);
        assert!(rel(a.p, ds.big_g * ds.big_g / model.mu) < 1e-14);
    }

    #[test]
    fn kepler_p_is_g_squared_over_mu() {
        let model = GravityModel::default().kepler();
        let (_, ds) = prisma_ds(&model);
        let a = ds.aux(&model);
        assert!(rel(a.gamma, ds.big_g) < 1e-15);
        assert!(rel(a.p, ds.big_g * ds.big_g / model.mu) < 1e-14);
    }

    #[test]
    fn nonsingular_set() {
        let model = GravityModel::default();
        let (_, ds) = prisma_ds(&model);
        let (theta, c, s, _) = nonsingular_of(&ds, &model);
        let e = ds.aux(&model).e;
        assert!((c * c + s * s - e * e).abs() < 1e-18);
        assert!((s.atan2(c) - ds.g).abs() < 1e-9);
        assert!((normalize_angle(theta - ds.phi - ds.g)).abs() < 1e-15);
        let g0 = DsState { g: 0.0, ..ds };
        let (_, c, s, _) = nonsingular_of(&g0, &model);
        assert!((c - e).abs() < 1e-18 && s == 0.0);
    }

    #[test]
    fn rebuild_from_nonsingular() {
        let model = GravityModel::default();
        let (_, ds) = prisma_ds(&model);
        let (theta, c, s, h) = nonsingular_of(&ds, &model);
        let x = canonical_from_nonsingular(
            theta,
            c,
            s,
            h,
            ds.lambda,
            ds.big_g,
            ds.big_h,
            ds.big_lambda,
            &model,
        );
        let y = ds.to_array();
        assert!((normalize_angle(x[PHI] - y[PHI])).abs() < 1e-9);
        assert!(rel(x[BIG_PHI], y[BIG_PHI]) < 1e-13);
    }

    #[test]
    fn eccentric_anomaly_branch_is_continuous() {
        let e = 0.3;
        let mut previous = eccentric_minus_true(-10.0, e);
        for k in 1..=2000 {
            let phi = -10.0 + 0.01 * k as f64;
            let d = eccentric_minus_true(phi, e);
            assert!((d - previous).abs() < 0.01);
            let u = phi + d;
            let direct = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt() * (phi / 2.0).tan()).atan();
            assert!((normalize_angle(u - direct)).abs() < 1e-12);
            previous = d;
        }
    }

    #[test]
    fn time_element_equals_time_when_circular() {
        let model = GravityModel::default();
        let mut ds = prisma_ds(&model).1;
        // force e = 0 by moving Φ so that 2Γ − G = √(μ p) with p = μ/(2Λ)
        let p = model.mu / (2.0 * ds.big_lambda);
        let gamma = 0.5 * (ds.big_g + (model.mu * p).sqrt());
        ds.big_phi = 2.0 * (ds.big_g - gamma) + model.mu / (2.0 * ds.big_lambda).sqrt();
        assert!(ds.aux(&model).e2.abs() < 1e-14);
        let polar = ds_to_polar(&ds, &model).unwrap();
        assert!((polar.t - ds.lambda).abs() < 1e-12 * ds.lambda.abs().max(1.0));
    }
}
