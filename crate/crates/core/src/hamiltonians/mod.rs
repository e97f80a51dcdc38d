//! Generating functions and secular Hamiltonian terms of the extended-phase-space
//! theory, written once over [`Scalar`] so that the same code yields values,
//! gradients and Hessians.

pub mod tables;

use crate::dsvars::{aux, Aux, BIG_LAMBDA, BIG_PHI, G_ANGLE, PHI};
use crate::elements::GravityModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use tables::{coefficient_tables, render_tables, CoefficientTables};
use tables::{InclinationPowers, LONG_PERIOD_SECOND_ORDER, SECULAR_THIRD_ORDER};

/// Smallest accepted |Δ| (and |5s² − 4|) before a critical-inclination error.
pub const DELTA_MIN: f64 = 1e-3;

fn check_divisor<S: Scalar>(divisor: S) -> Result<()> {
    if divisor.value().abs() < DELTA_MIN {
        Err(Error::CriticalInclination {
            divisor: divisor.value(),
        })
    } else {
        Ok(())
    }
}

/// Γ R⊕^{2n} / ρ^{2n}.
fn scale<S: Scalar>(a: &Aux<S>, model: &GravityModel, n: u32) -> S {
    let ratio = (a.rho.sq()).recip() * (model.re * model.re);
    a.gamma * ratio.powi(n)
}

/// First-order short-period generator.
pub fn w1<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    w1_at(x, &aux(x, model), model)
}

/// [`w1`] with the auxiliaries supplied by the caller.
pub fn w1_at<S: Scalar>(x: &[S; 8], a: &Aux<S>, model: &GravityModel) -> S {
    w1_with(a, x[PHI], x[G_ANGLE], model)
}

fn w1_with<S: Scalar>(a: &Aux<S>, phi: S, g: S, model: &GravityModel) -> S {
    let s2 = a.s2;
    let e = a.e;
    let g2 = g * 2.0;
    let bracket = (-(s2 * 6.0) + 4.0) * e * phi.sin()
        + e * s2 * (g2 + phi).sin() * 3.0
        + s2 * (g2 + phi * 2.0).sin() * 3.0
        + e * s2 * (g2 + phi * 3.0).sin();
    -(scale(a, model, 1) * bracket) * 0.125
}

/// Second-order short-period generator.
pub fn w2<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    w2_at(x, &aux(x, model), model)
}

/// [`w2`] with the auxiliaries supplied by the caller.
pub fn w2_at<S: Scalar>(x: &[S; 8], a: &Aux<S>, model: &GravityModel) -> S {
    let (phi, g) = (x[PHI], x[G_ANGLE]);
    let (s2, e, e2, d, u) = (a.s2, a.e, a.e2, a.delta, a.upsilon);
    let s4 = s2.sq();
    let s2m1 = s2 - 1.0;
    let t32 = s2 * 3.0 - 2.0;
    let g2 = g * 2.0;
    let g4 = g * 4.0;

    let c1 = (s4 * 45.0 + s2 * 72.0 - 80.0 + s2 * s2m1 * d * 168.0
        - (s4 * 33.0 - s2 * 48.0 + 16.0) * u * 4.0)
        * 60.0;
    let c2 = ((s2 * 5.0 - 4.0) * s2 + s2 * s2m1 * d * 4.0) * 360.0;
    let c3 = (s2 * 225.0 - 206.0 + s2m1 * d * 168.0 + t32 * u * 4.0) * (-90.0);
    let inner = s2 * 3.0 - 4.0 + s2m1 * d * 6.0 - t32 * u;
    let c4 = (s2 * 39.0 - 38.0 + s2m1 * d * 36.0 - t32 * u * 2.0 + e2 * inner * 2.0) * (-120.0);
    let c5 = (s2 * 75.0 - 42.0 - s2m1 * d * 24.0 + t32 * u * 28.0) * 10.0;
    let c6 = (s2 * 15.0 - 14.0 + s2m1 * d * 12.0) * 30.0;
    let c7 = (u * 4.0 + 5.0) * 45.0;
    let c8 = ((u + 1.0) * 2.0 + (u * 2.0 + 3.0) * e2) * 45.0;
    let c9 = (u * 4.0 + 5.0) * 9.0;

    let sum = c1 * e * phi.sin()
        + c2 * e2 * (phi * 2.0).sin()
        + c3 * s2 * e * (g2 + phi).sin()
        + c4 * s2 * (g2 + phi * 2.0).sin()
        + c5 * s2 * e * (g2 + phi * 3.0).sin()
        + c6 * s2 * e2 * (g2 + phi * 4.0).sin()
        + c7 * s4 * e * (g4 + phi * 3.0).sin()
        + c8 * s4 * (g4 + phi * 4.0).sin()
        + c9 * s4 * e * (g4 + phi * 5.0).sin();
    scale(a, model, 2) * sum / 3840.0
}

/// First-order long-period generator.
pub fn v1<S: Scalar>(x: &[S; 8], model: &GravityModel) -> Result<S> {
    v1_at(x, &aux(x, model), model)
}

/// [`v1`] with the auxiliaries supplied by the caller.
pub fn v1_at<S: Scalar>(x: &[S; 8], a: &Aux<S>, model: &GravityModel) -> Result<S> {
    check_divisor(a.big_delta)?;
    let bracket = a.s2 * 15.0 - 14.0 + (a.s2 - 1.0) * a.delta * 12.0;
    let harmonic = (x[G_ANGLE] * 2.0).sin();
    Ok(scale(a, model, 1) * (3.0 / 32.0) / a.big_delta * bracket * a.s2 * a.e2 * harmonic)
}

/// Second-order long-period generator.
///
/// With `simplified`, the explicit δ and υ are set to zero after
/// differentiation: their values vanish but their derivatives are kept, so
/// brackets formed from the result are the simplified second-order corrections.
pub fn v2<S: Scalar>(x: &[S; 8], model: &GravityModel, simplified: bool) -> Result<S> {
    v2_at(x, &aux(x, model), model, simplified)
}

/// [`v2`] with the auxiliaries supplied by the caller.
pub fn v2_at<S: Scalar>(
    x: &[S; 8],
    a: &Aux<S>,
    model: &GravityModel,
    simplified: bool,
) -> Result<S> {
    let mut a = *a;
    if simplified {
        a.delta = a.delta.with_value(0.0);
        a.upsilon = a.upsilon.with_value(0.0);
        a.big_delta = (a.s2 * 5.0 - 4.0) * 3.0
            + (a.s2 - 1.0) * a.delta * 6.0
            + (a.s2 * 3.0 - 2.0) * a.upsilon * 2.0;
    }
    check_divisor(a.big_delta)?;
    let one_d = powers(a.delta + 1.0);
    let one_u = powers(a.upsilon + 1.0);
    let pw = InclinationPowers::new(a.s2);
    let mut columns = [S::cst(0.0), S::cst(0.0), S::cst(0.0)];
    for r in LONG_PERIOD_SECOND_ORDER.iter() {
        let weight = one_d[r.i] * one_u[r.j];
        for (col, entry) in columns.iter_mut().zip(r.cols.iter()) {
            if !entry.is_zero() {
                *col = *col + entry.eval_factored(&pw) * weight;
            }
        }
    }
    let g = x[G_ANGLE];
    let e4 = a.e2.sq();
    let s4 = a.s2.sq();
    // (l,k) = (1,0), (1,1), (2,0): e^{2k+2l} s^{2l} sin 2lg
    let sin2g = (g * 2.0).sin();
    let sin4g = (g * 4.0).sin();
    let sum = columns[0] * a.e2 * a.s2 * sin2g
        + columns[1] * e4 * a.s2 * sin2g
        + columns[2] * e4 * s4 * sin4g;
    Ok(scale(&a, model, 2) * (3.0 / 1024.0) / a.big_delta.powi(3) * sum)
}

fn powers<S: Scalar>(base: S) -> [S; 5] {
    let mut out = [S::cst(1.0); 5];
    for k in 1..5 {
        out[k] = out[k - 1] * base;
    }
    out
}

/// First-order secular term.
pub fn f1<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    let a = aux(x, model);
    scale(&a, model, 1) * (a.s2 * 3.0 - 2.0) * 0.25
}

/// Second-order secular term.
pub fn f2<S: Scalar>(x: &[S; 8], model: &GravityModel) -> S {
    let a = aux(x, model);
    let (s2, e2) = (a.s2, a.e2);
    let s4 = s2.sq();
    let bracket = (s4 * 15.0 - s2 * 6.0 - 4.0) * 4.0
        + (s4 * 5.0 + s2 * 8.0 - 8.0) * e2 * 3.0
        + s2 * (e2 * 2.0 + 3.0) * (s2 - 1.0) * a.delta * 24.0
        - (e2 + 1.0) * (s4 * 15.0 - s2 * 24.0 + 8.0) * a.upsilon * 2.0;
    scale(&a, model, 2) * bracket / 64.0
}

/// Third-order secular term.
pub fn f3<S: Scalar>(x: &[S; 8], model: &GravityModel) -> Result<S> {
    let a = aux(x, model);
    check_divisor(a.big_delta)?;
    let one_d = powers(a.delta + 1.0);
    let one_u = powers(a.upsilon + 1.0);
    let e_pow = [S::cst(1.0), a.e2, a.e2.sq()];
    let pw = InclinationPowers::new(a.s2);
    let mut sum = S::cst(0.0);
    for r in SECULAR_THIRD_ORDER.iter() {
        let mut row = S::cst(0.0);
        for (k, entry) in r.cols.iter().enumerate() {
            if !entry.is_zero() {
                row = row + entry.eval_factored(&pw) * e_pow[k];
            }
        }
        sum = sum + row * one_d[r.i] * one_u[r.j];
    }
    Ok(scale(&a, model, 3) * (3.0 / 1024.0) / a.big_delta.sq() * sum)
}

/// 𝓕_m for m ∈ {1, 2, 3}.
pub fn f_secular<S: Scalar>(x: &[S; 8], model: &GravityModel, order: u32) -> Result<S> {
    match order {
        1 => Ok(f1(x, model)),
        2 => Ok(f2(x, model)),
        3 => f3(x, model),
        _ => Err(Error::Config(format!("secular order {order} not in 1..=3"))),
    }
}

/// Φ − μ/√(2Λ) + Σ_{m ≤ max_order} J2^m/m! 𝓕_m.
pub fn secular_hamiltonian<S: Scalar>(
    x: &[S; 8],
    model: &GravityModel,
    max_order: u32,
) -> Result<S> {
    let mut total = x[BIG_PHI] - (x[BIG_LAMBDA] * 2.0).sqrt().recip() * model.mu;
    let mut weight = 1.0;
    for m in 1..=max_order {
        weight *= model.j2 / f64::from(m);
        total = total + f_secular(x, model, m)? * weight;
    }
    Ok(total)
}

/// Brouwer's second-order long-period generator (comparison only; never composed).
pub fn brouwer_v2star(
    big_g: f64,
    p: f64,
    e: f64,
    s: f64,
    g: f64,
    model: &GravityModel,
) -> Result<f64> {
    let s2 = s * s;
    let dt = 5.0 * s2 - 4.0;
    check_divisor(dt)?;
    let eta = (1.0 - e * e).sqrt();
    let tables = coefficient_tables();
    let mut total = 0.0;
    for j in 1..=2usize {
        let jf = j as i32;
        let mut inner = 0.0;
        for (jj, i, poly) in &tables.brouwer {
            if *jj == j {
                inner += s2.horner(poly) * eta.powi(*i as i32);
            }
        }
        total += (1.0 + eta).powi(jf - 2) / dt.powi(jf - 1)
            * inner
            * e.powi(2 * jf)
            * s2.powi(jf)
            * (2.0 * jf as f64 * g).sin();
    }
    Ok(big_g * model.re.powi(4) / p.powi(4) / 1024.0 / (dt * dt) * total)
}

#[cfg(test)]
mod tests;
