//! Element sets, state charts and frame projections of the main problem.
//!
//! Units are km, km/s, s and rad throughout. Angles returned by the
//! conversions are normalized to (−π, π].

use nalgebra::Vector3;
use std::f64::consts::{PI, TAU};

use crate::classic_theory::solve_kepler;
use crate::error::{Error, Result};

/// Eccentricities below this value are treated as exactly circular.
pub const CIRCULAR_ECCENTRICITY: f64 = 1e-12;

/// Point mass plus the J2 zonal harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityModel {
    /// Gravitational parameter (km³/s²).
    pub mu: f64,
    /// Equatorial radius (km).
    pub re: f64,
    /// Oblateness coefficient.
    pub j2: f64,
}

impl Default for GravityModel {
    fn default() -> Self {
        GravityModel {
            mu: 398_600.441_5,
            re: 6_378.136_3,
            j2: 1.082_626_17e-3,
        }
    }
}

impl GravityModel {
    pub fn new(mu: f64, re: f64, j2: f64) -> Result<Self> {
        if !(mu > 0.0) || !(re > 0.0) || !(j2 >= 0.0) {
            return Err(Error::Config(format!(
                "gravity model requires mu > 0, re > 0, j2 >= 0 (got {mu}, {re}, {j2})"
            )));
        }
        Ok(GravityModel { mu, re, j2 })
    }

    /// Same constants with the oblateness switched off.
    pub fn kepler(&self) -> Self {
        GravityModel { j2: 0.0, ..*self }
    }

    pub fn with_j2(&self, j2: f64) -> Self {
        GravityModel { j2, ..*self }
    }
}

/// Degree-2 Legendre polynomial.
#[inline]
pub fn legendre_p2(x: f64) -> f64 {
    1.5 * x * x - 0.5
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Physical epoch (s).
    pub t: f64,
}

impl CartesianState {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, t: f64) -> Self {
        CartesianState {
            position,
            velocity,
            t,
        }
    }

    pub fn with_epoch(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn radius(&self) -> f64 {
        self.position.norm()
    }

    pub fn angular_momentum(&self) -> Vector3<f64> {
        self.position.cross(&self.velocity)
    }

    /// Two-body energy v²/2 − μ/r.
    pub fn keplerian_energy(&self, mu: f64) -> f64 {
        0.5 * self.velocity.norm_squared() - mu / self.radius()
    }

    /// Value of the main-problem Hamiltonian (the total energy per unit mass).
    pub fn hamiltonian(&self, model: &GravityModel) -> f64 {
        let r = self.radius();
        let sin_lat = self.position.z / r;
        self.keplerian_energy(model.mu)
            + model.j2 * model.mu / r * (model.re / r).powi(2) * legendre_p2(sin_lat)
    }
}

/// Polar-nodal (Hill) variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    /// Radius (km).
    pub r: f64,
    /// Radial velocity (km/s).
    pub big_r: f64,
    /// Argument of latitude (rad).
    pub theta: f64,
    /// Angular momentum magnitude (km²/s).
    pub big_theta: f64,
    /// Polar component of the angular momentum (km²/s).
    pub n: f64,
    /// Right ascension of the ascending node (rad).
    pub node: f64,
    /// Physical epoch (s).
    pub t: f64,
}

impl PolarState {
    pub fn cos_inclination(&self) -> f64 {
        (self.n / self.big_theta).clamp(-1.0, 1.0)
    }

    pub fn sin_inclination(&self) -> f64 {
        let c = self.cos_inclination();
        (1.0 - c * c).max(0.0).sqrt()
    }

    pub fn hamiltonian(&self, model: &GravityModel) -> f64 {
        let r = self.r;
        0.5 * (self.big_r * self.big_r + (self.big_theta / r).powi(2)) - model.mu / r
            + model.j2 * model.mu / r
                * (model.re / r).powi(2)
                * legendre_p2(self.sin_inclination() * self.theta.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalElements {
    /// Semimajor axis (km).
    pub a: f64,
    pub e: f64,
    /// Inclination (rad).
    pub inc: f64,
    /// Right ascension of the ascending node (rad).
    pub raan: f64,
    /// Argument of perigee (rad).
    pub argp: f64,
    /// Mean anomaly (rad).
    pub mean_anomaly: f64,
}

impl ClassicalElements {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) {
            return Err(Error::InvalidElements(format!(
                "a = {} must be > 0",
                self.a
            )));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(Error::InvalidElements(format!(
                "e = {} outside [0, 1)",
                self.e
            )));
        }
        if !(0.0..=PI).contains(&self.inc) {
            return Err(Error::InvalidElements(format!(
                "inclination {} outside [0, π]",
                self.inc
            )));
        }
        Ok(())
    }

    /// The PRISMA test orbit used throughout the campaign.
    pub fn prisma() -> Self {
        ClassicalElements {
            a: 6878.14,
            e: 0.001,
            inc: 97.42f64.to_radians(),
            raan: 168.2f64.to_radians(),
            argp: 20f64.to_radians(),
            mean_anomaly: 30f64.to_radians(),
        }
    }

    pub fn to_cartesian(&self, model: &GravityModel) -> Result<CartesianState> {
        classical_to_cartesian(self, model)
    }
}

/// Orbit-plane basis: ascending-node direction and its in-plane normal.
fn plane_basis(raan: f64, inc: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    (
        Vector3::new(co, so, 0.0),
        Vector3::new(-ci * so, ci * co, si),
    )
}

/// Two-body geometry from classical elements, at epoch zero.
pub fn classical_to_cartesian(
    coe: &ClassicalElements,
    model: &GravityModel,
) -> Result<CartesianState> {
    coe.validate()?;
    let e = coe.e;
    let ecc_anomaly = solve_kepler(coe.mean_anomaly, e);
    let nu = 2.0
        * ((1.0 + e).sqrt() * (0.5 * ecc_anomaly).sin())
            .atan2((1.0 - e).sqrt() * (0.5 * ecc_anomaly).cos());
    let p = coe.a * (1.0 - e * e);
    let r = p / (1.0 + e * nu.cos());
    let (n_hat, m_hat) = plane_basis(coe.raan, coe.inc);
    let (su, cu) = (coe.argp + nu).sin_cos();
    let r_hat = n_hat * cu + m_hat * su;
    let s_hat = m_hat * cu - n_hat * su;
    let vp = (model.mu / p).sqrt();
    Ok(CartesianState::new(
        r_hat * r,
        r_hat * (vp * e * nu.sin()) + s_hat * (vp * (1.0 + e * nu.cos())),
        0.0,
    ))
}

pub fn cartesian_to_classical(
    x: &CartesianState,
    model: &GravityModel,
) -> Result<ClassicalElements> {
    let mu = model.mu;
    let r = x.radius();
    if !(r > 0.0) {
        return Err(Error::DegenerateState("zero radius".into()));
    }
    let energy = x.keplerian_energy(mu);
    if energy >= 0.0 {
        return Err(Error::UnboundOrbit { energy });
    }
    let h = x.angular_momentum();
    let hn = h.norm();
    if hn <= 1e-12 * r * x.velocity.norm() {
        return Err(Error::DegenerateState("rectilinear orbit".into()));
    }
    let a = -mu / (2.0 * energy);
    let inc = (h.z / hn).clamp(-1.0, 1.0).acos();
    let raan = if (h.x * h.x + h.y * h.y).sqrt() > 1e-14 * hn {
        h.x.atan2(-h.y)
    } else {
        0.0
    };
    let (n_hat, m_hat) = plane_basis(raan, inc);
    let ecc_vec = (x.position * (x.velocity.norm_squared() - mu / r)
        - x.velocity * x.position.dot(&x.velocity))
        / mu;
    let e = ecc_vec.norm();
    let arg_lat = x.position.dot(&m_hat).atan2(x.position.dot(&n_hat));
    let (argp, mean_anomaly) = if e < CIRCULAR_ECCENTRICITY {
        (0.0, arg_lat)
    } else {
        let argp = ecc_vec.dot(&m_hat).atan2(ecc_vec.dot(&n_hat));
        let nu = arg_lat - argp;
        let ecc_anomaly = ((1.0 - e * e).sqrt() * nu.sin()).atan2(e + nu.cos());
        (argp, ecc_anomaly - e * ecc_anomaly.sin())
    };
    Ok(ClassicalElements {
        a,
        e,
        inc,
        raan: normalize_angle(raan),
        argp: normalize_angle(argp),
        mean_anomaly: normalize_angle(mean_anomaly),
    })
}

pub fn cartesian_to_polar(x: &CartesianState) -> Result<PolarState> {
    let r = x.radius();
    if !(r > 0.0) {
        return Err(Error::DegenerateState("zero radius".into()));
    }
    let h = x.angular_momentum();
    let big_theta = h.norm();
    if big_theta <= 1e-12 * r * x.velocity.norm() {
        return Err(Error::DegenerateState("rectilinear orbit".into()));
    }
    let inc = (h.z / big_theta).clamp(-1.0, 1.0).acos();
    let node = if (h.x * h.x + h.y * h.y).sqrt() > 1e-14 * big_theta {
        h.x.atan2(-h.y)
    } else {
        0.0
    };
    let (n_hat, m_hat) = plane_basis(node, inc);
    Ok(PolarState {
        r,
        big_r: x.position.dot(&x.velocity) / r,
        theta: x.position.dot(&m_hat).atan2(x.position.dot(&n_hat)),
        big_theta,
        n: h.z,
        node: normalize_angle(node),
        t: x.t,
    })
}

pub fn polar_to_cartesian(p: &PolarState) -> CartesianState {
    let ci = p.cos_inclination();
    let si = p.sin_inclination();
    let (so, co) = p.node.sin_cos();
    let n_hat = Vector3::new(co, so, 0.0);
    let m_hat = Vector3::new(-ci * so, ci * co, si);
    let (st, ct) = p.theta.sin_cos();
    let r_hat = n_hat * ct + m_hat * st;
    let s_hat = m_hat * ct - n_hat * st;
    CartesianState::new(
        r_hat * p.r,
        r_hat * p.big_r + s_hat * (p.big_theta / p.r),
        p.t,
    )
}

/// Position error projected on the radial, along-track and cross-track
/// directions of the reference orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RswError {
    pub radial: f64,
    pub along_track: f64,
    pub cross_track: f64,
    pub rss: f64,
    pub t: f64,
}

/// Epochs must agree to within this many seconds.
pub const EPOCH_TOLERANCE: f64 = 1e-9;

pub fn rsw_basis(reference: &CartesianState) -> [Vector3<f64>; 3] {
    let r_hat = reference.position.normalize();
    let w_hat = reference.angular_momentum().normalize();
    let s_hat = w_hat.cross(&r_hat);
    [r_hat, s_hat, w_hat]
}

pub fn rsw_errors(reference: &CartesianState, test: &CartesianState) -> Result<RswError> {
    if (reference.t - test.t).abs() > EPOCH_TOLERANCE {
        return Err(Error::EpochMismatch {
            reference: reference.t,
            test: test.t,
        });
    }
    Ok(rsw_projection(
        reference,
        &(test.position - reference.position),
    ))
}

/// Projection of a position difference without the epoch check. Used for
/// comparisons at a common fictitious time, where physical epochs differ
/// by construction.
pub fn rsw_projection(reference: &CartesianState, delta: &Vector3<f64>) -> RswError {
    let [r_hat, s_hat, w_hat] = rsw_basis(reference);
    RswError {
        radial: delta.dot(&r_hat),
        along_track: delta.dot(&s_hat),
        cross_track: delta.dot(&w_hat),
        rss: delta.norm(),
        t: reference.t,
    }
}
