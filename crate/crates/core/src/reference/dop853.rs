//! Dormand–Prince 8(5,3) with dense output, generic over the working scalar.

use std::str::FromStr;

use super::tableau;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Right-hand side of y' = f(t, y).
pub trait System<S, const N: usize> {
    fn rhs(&self, t: S, y: &[S; N]) -> [S; N];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dop853Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; estimated when `None`.
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Take steps of exactly this size with no error control.
    pub fixed_step: Option<f64>,
}

impl Default for Dop853Options {
    fn default() -> Self {
        Dop853Options {
            rtol: 1e-13,
            atol: 1e-13,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
            fixed_step: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// One accepted step with its seventh-degree continuous extension.
#[derive(Clone, Copy, Debug)]
pub struct DenseStep<S, const N: usize> {
    pub t: S,
    pub h: S,
    pub cont: [[S; N]; 8],
    pub y_end: [S; N],
}

impl<S: Scalar, const N: usize> DenseStep<S, N> {
    pub fn t_end(&self) -> S {
        self.t + self.h
    }

    /// Interpolated state at `t` (meaningful for t in [self.t, self.t_end()]).
    pub fn eval(&self, t: S) -> [S; N] {
        let s = (t - self.t) / self.h;
        let s1 = -s + 1.0;
        let c = &self.cont;
        std::array::from_fn(|i| {
            let conpar = c[4][i] + s * (c[5][i] + s1 * (c[6][i] + s * c[7][i]));
            c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * conpar)))
        })
    }
}

/// Coefficients parsed into the working precision; indices are 1-based stage numbers.
struct Tableau<S> {
    a: Vec<Vec<(usize, S)>>,
    c: [S; 17],
    b: Vec<(usize, S)>,
    er: Vec<(usize, S)>,
    bhh: [S; 3],
    d: [Vec<(usize, S)>; 4],
}

fn parse<S: FromStr>(text: &str) -> S {
    text.parse()
        .ok()
        .unwrap_or_else(|| panic!("tableau literal {text} does not parse"))
}

impl<S: Scalar + FromStr> Tableau<S> {
    fn new() -> Self {
        let zero = S::cst(0.0);
        let mut a = vec![Vec::new(); 17];
        for &(i, j, v) in tableau::A {
            a[i].push((j, parse(v)));
        }
        let mut c = [zero; 17];
        for &(i, _, v) in tableau::C {
            c[i] = parse(v);
        }
        // stages 12 and 13 sit at the end of the step and are not listed
        c[12] = S::cst(1.0);
        c[13] = S::cst(1.0);
        let list = |rows: &[(usize, usize, &str)]| {
            rows.iter()
                .map(|&(i, _, v)| (i, parse(v)))
                .collect::<Vec<_>>()
        };
        let mut d: [Vec<(usize, S)>; 4] = Default::default();
        for &(r, j, v) in tableau::D {
            d[r - 4].push((j, parse(v)));
        }
        let bhh = [
            parse(tableau::BHH[0].2),
            parse(tableau::BHH[1].2),
            parse(tableau::BHH[2].2),
        ];
        Tableau {
            a,
            c,
            b: list(tableau::B),
            er: list(tableau::ER),
            bhh,
            d,
        }
    }
}

/// y + h Σ coef·k_j.
fn combine<S: Scalar, const N: usize>(
    y: &[S; N],
    h: S,
    terms: &[(usize, S)],
    k: &[[S; N]],
) -> [S; N] {
    std::array::from_fn(|i| {
        let mut acc = S::cst(0.0);
        for &(j, coef) in terms {
            acc = acc + coef * k[j][i];
        }
        y[i] + h * acc
    })
}

fn weighted<S: Scalar, const N: usize>(terms: &[(usize, S)], k: &[[S; N]]) -> [S; N] {
    std::array::from_fn(|i| {
        let mut acc = S::cst(0.0);
        for &(j, coef) in terms {
            acc = acc + coef * k[j][i];
        }
        acc
    })
}

fn scaled_norm<S: Scalar, const N: usize>(v: &[S; N], y: &[S; N], opts: &Dop853Options) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sk = opts.atol + opts.rtol * y[i].value().abs();
            (v[i].value() / sk).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

/// Starting step from the usual first/second derivative estimate.
fn initial_step<S: Scalar, Sys: System<S, N>, const N: usize>(
    sys: &Sys,
    t0: S,
    y0: &[S; N],
    f0: &[S; N],
    span: f64,
    opts: &Dop853Options,
) -> f64 {
    let d0 = scaled_norm(y0, y0, opts);
    let d1 = scaled_norm(f0, y0, opts);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(opts.h_max).min(span.abs());
    let y1: [S; N] = std::array::from_fn(|i| y0[i] + f0[i] * h0);
    let f1 = sys.rhs(t0 + h0, &y1);
    let diff: [S; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = scaled_norm(&diff, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    (100.0 * h0).min(h1).min(opts.h_max).min(span.abs())
}

/// Integrates from `t0` to `tf` (tf > t0), handing every accepted step with
/// its dense output to `observer`. Returns the final state and counters.
pub fn integrate<S, Sys, F, const N: usize>(
    sys: &Sys,
    t0: S,
    y0: [S; N],
    tf: S,
    opts: &Dop853Options,
    mut observer: F,
) -> Result<([S; N], Stats)>
where
    S: Scalar + FromStr,
    Sys: System<S, N>,
    F: FnMut(&DenseStep<S, N>),
{
    let tab = Tableau::<S>::new();
    let (safe, facc1, facc2, expo1): (f64, f64, f64, f64) =
        (0.9, 1.0 / 0.333, 1.0 / 6.0, 1.0 / 8.0);
    let mut stats = Stats::default();
    let span = (tf - t0).value();
    if span <= 0.0 {
        return Err(Error::Config(format!(
            "integration span {span} must be positive"
        )));
    }
    let mut t = t0;
    let mut y = y0;
    let zero = [S::cst(0.0); N];
    let mut k = [zero; 17];
    k[1] = sys.rhs(t, &y);
    stats.evaluations += 1;
    let mut h = match (opts.fixed_step, opts.h0) {
        (Some(step), _) | (None, Some(step)) => step,
        (None, None) => {
            stats.evaluations += 1;
            initial_step(sys, t, &y, &k[1], span, opts)
        }
    };
    let mut last_rejected = false;
    loop {
        let remaining = (tf - t).value();
        if remaining <= span.abs() * 1e-15 {
            break;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence {
                what: "dop853 step budget",
                iterations: opts.max_steps,
                residual: remaining,
            });
        }
        let last = h * 1.01 >= remaining;
        let hs = if last { tf - t } else { S::cst(h) };
        let h_now = hs.value();
        if h_now.abs() <= (t.value().abs() * f64::EPSILON * 10.0).max(1e-300) {
            return Err(Error::StepSizeUnderflow {
                t: t.value(),
                h: h_now,
            });
        }

        for stage in 2..=12 {
            let yi = combine(&y, hs, &tab.a[stage], &k);
            k[stage] = sys.rhs(t + tab.c[stage] * hs, &yi);
        }
        stats.evaluations += 11;
        let increment = weighted(&tab.b, &k);
        let y_new: [S; N] = std::array::from_fn(|i| y[i] + hs * increment[i]);

        let err = if opts.fixed_step.is_some() {
            0.0
        } else {
            let e5 = weighted(&tab.er, &k);
            let e3: [S; N] = std::array::from_fn(|i| {
                increment[i] - tab.bhh[0] * k[1][i] - tab.bhh[1] * k[9][i] - tab.bhh[2] * k[12][i]
            });
            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..N {
                let sk = opts.atol + opts.rtol * y[i].value().abs().max(y_new[i].value().abs());
                err += (e5[i].value() / sk).powi(2);
                err2 += (e3[i].value() / sk).powi(2);
            }
            let deno = if err + 0.01 * err2 > 0.0 {
                err + 0.01 * err2
            } else {
                1.0
            };
            h_now.abs() * err * (1.0 / (deno * N as f64)).sqrt()
        };

        let fac11 = err.powf(expo1);
        let fac = facc2.max(facc1.min(fac11 / safe));
        let mut h_new = h_now / fac;

        if err <= 1.0 {
            let t_new = t + hs;
            k[13] = sys.rhs(t_new, &y_new);
            stats.evaluations += 1;
            observer(&dense_step(sys, &tab, t, hs, &y, &y_new, &mut k));
            stats.evaluations += 3;
            stats.accepted += 1;
            k[1] = k[13];
            y = y_new;
            t = t_new;
            if last_rejected {
                h_new = h_new.min(h_now);
            }
            last_rejected = false;
            if last {
                break;
            }
        } else {
            h_new = h_now / facc1.min(fac11 / safe);
            last_rejected = true;
            stats.rejected += 1;
        }
        h = match opts.fixed_step {
            Some(step) => step,
            None => h_new.min(opts.h_max),
        };
    }
    Ok((y, stats))
}

fn dense_step<S: Scalar, Sys: System<S, N>, const N: usize>(
    sys: &Sys,
    tab: &Tableau<S>,
    t: S,
    h: S,
    y: &[S; N],
    y_new: &[S; N],
    k: &mut [[S; N]; 17],
) -> DenseStep<S, N> {
    for stage in 14..=16 {
        let yi = combine(y, h, &tab.a[stage], k);
        k[stage] = sys.rhs(t + tab.c[stage] * h, &yi);
    }
    let ydiff: [S; N] = std::array::from_fn(|i| y_new[i] - y[i]);
    let bspl: [S; N] = std::array::from_fn(|i| h * k[1][i] - ydiff[i]);
    let mut cont = [[S::cst(0.0); N]; 8];
    cont[0] = *y;
    cont[1] = ydiff;
    cont[2] = bspl;
    cont[3] = std::array::from_fn(|i| ydiff[i] - h * k[13][i] - bspl[i]);
    for r in 0..4 {
        let w = weighted(&tab.d[r], k);
        cont[4 + r] = std::array::from_fn(|i| h * w[i]);
    }
    DenseStep {
        t,
        h,
        cont,
        y_end: *y_new,
    }
}
