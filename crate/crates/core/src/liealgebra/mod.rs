//! Poisson brackets over the canonical chart and the Lie-transform maps
//! between osculating, prime and mean variables.

mod jet;

pub use jet::{Jet2, DIM};

use crate::dsvars::{
    aux, aux_with_gap, canonical_from_nonsingular, Aux, BIG_G, BIG_H, BIG_LAMBDA, BIG_PHI, G_ANGLE,
    H_ANGLE, LAMBDA, PHI,
};
use crate::elements::GravityModel;
use crate::error::Result;
use crate::hamiltonians::{v1_at, v2_at, w1_at, w2_at};
use crate::scalar::Scalar;

const HALF: usize = DIM / 2;

/// Seeds the eight canonical variables as independent jets.
pub fn seed(x: &[f64; DIM]) -> [Jet2; DIM] {
    std::array::from_fn(|i| Jet2::variable(i, x[i]))
}

/// {f, g} = Σ ∂f/∂qᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qᵢ.
pub fn poisson(f: &Jet2, g: &Jet2) -> f64 {
    poisson_grad(&f.grad, &g.grad)
}

fn poisson_grad(f: &[f64; DIM], g: &[f64; DIM]) -> f64 {
    (0..HALF)
        .map(|i| f[i] * g[i + HALF] - f[i + HALF] * g[i])
        .sum()
}

/// Gradient of {f, g}, from first and second derivatives of both operands.
pub fn poisson_gradient(f: &Jet2, g: &Jet2) -> [f64; DIM] {
    std::array::from_fn(|m| {
        let mut acc = 0.0;
        for i in 0..HALF {
            let p = i + HALF;
            acc += f.hess[m][i] * g.grad[p] + f.grad[i] * g.hess[m][p]
                - f.hess[m][p] * g.grad[i]
                - f.grad[p] * g.hess[m][i];
        }
        acc
    })
}

/// {{f, w}, w}.
pub fn nested_bracket(f: &Jet2, w: &Jet2) -> f64 {
    poisson_grad(&poisson_gradient(f, w), &w.grad)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// W1, W2: elimination of the true anomaly.
    ShortPeriod,
    /// V1, V2: elimination of the argument of perigee.
    LongPeriod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Toward the osculating side: prime → osculating, mean → prime.
    Direct,
    /// Toward the mean side: osculating → prime, prime → mean.
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Direct => 1.0,
            Direction::Inverse => -1.0,
        }
    }
}

/// Per-variable increments (φ, g, h, λ, Φ, G, H, Λ), not yet weighted by J2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionVector {
    pub delta: [f64; DIM],
    pub order: u32,
    pub kind: GeneratorKind,
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MapOptions {
    /// Evaluate second-order long-period corrections with δ = υ = 0.
    pub simplified_long_period: bool,
}

/// Generator jets (first order, and second order when requested).
fn generators(
    x: &[Jet2; DIM],
    a: &Aux<Jet2>,
    kind: GeneratorKind,
    order: u32,
    model: &GravityModel,
    opts: MapOptions,
) -> Result<(Jet2, Option<Jet2>)> {
    Ok(match kind {
        GeneratorKind::ShortPeriod => {
            (w1_at(x, a, model), (order >= 2).then(|| w2_at(x, a, model)))
        }
        GeneratorKind::LongPeriod => {
            let second = if order >= 2 {
                Some(v2_at(x, a, model, opts.simplified_long_period)?)
            } else {
                None
            };
            (v1_at(x, a, model)?, second)
        }
    })
}

/// δ₁,ξ = {ξ, W} for every canonical variable ξ.
pub fn first_order_correction(
    kind: GeneratorKind,
    x: &[f64; DIM],
    model: &GravityModel,
    direction: Direction,
) -> Result<CorrectionVector> {
    let jets = seed(x);
    let (w, _) = generators(
        &jets,
        &aux(&jets, model),
        kind,
        1,
        model,
        MapOptions::default(),
    )?;
    Ok(CorrectionVector {
        delta: std::array::from_fn(|i| poisson(&jets[i], &w)),
        order: 1,
        kind,
        direction,
    })
}

/// Direct: {{ξ,W1},W1} + {ξ,W2}; inverse: {{ξ,W1},W1} − {ξ,W2}.
pub fn second_order_correction(
    kind: GeneratorKind,
    x: &[f64; DIM],
    model: &GravityModel,
    direction: Direction,
    opts: MapOptions,
) -> Result<CorrectionVector> {
    let jets = seed(x);
    let (w, second) = generators(&jets, &aux(&jets, model), kind, 2, model, opts)?;
    let second = second.expect("second-order generator requested");
    Ok(CorrectionVector {
        delta: std::array::from_fn(|i| {
            nested_bracket(&jets[i], &w) + direction.sign() * poisson(&jets[i], &second)
        }),
        order: 2,
        kind,
        direction,
    })
}

/// Number of non-singular functions carried through a map.
pub const NONSINGULAR: usize = 6;

/// Jets of (θ, C, S, h, λ, G) over the canonical chart.
pub fn nonsingular_jets(x: &[Jet2; DIM], a: &Aux<Jet2>) -> [Jet2; NONSINGULAR] {
    let (sg, cg) = x[G_ANGLE].sin_cos();
    [
        x[PHI] + x[G_ANGLE],
        a.e * cg,
        a.e * sg,
        x[H_ANGLE],
        x[LAMBDA],
        x[BIG_G],
    ]
}

/// A point given by the non-singular values (θ, C, S, h, λ, G) and the
/// momenta H, Λ.
///
/// Chaining maps through this form keeps e = |(C, S)| exact; reading e back
/// from Φ − G in the canonical chart costs digits when e is small.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonsingularPoint {
    pub values: [f64; NONSINGULAR],
    pub big_h: f64,
    pub big_lambda: f64,
}

impl NonsingularPoint {
    pub fn from_canonical(x: &[f64; DIM], model: &GravityModel) -> Self {
        let a = aux(x, model);
        let (sg, cg) = x[G_ANGLE].sin_cos();
        NonsingularPoint {
            values: [
                x[PHI] + x[G_ANGLE],
                a.e * cg,
                a.e * sg,
                x[H_ANGLE],
                x[LAMBDA],
                x[BIG_G],
            ],
            big_h: x[BIG_H],
            big_lambda: x[BIG_LAMBDA],
        }
    }

    pub fn canonical(&self, model: &GravityModel) -> [f64; DIM] {
        let [theta, c, s, h, lambda, big_g] = self.values;
        canonical_from_nonsingular(
            theta,
            c,
            s,
            h,
            lambda,
            big_g,
            self.big_h,
            self.big_lambda,
            model,
        )
    }

    /// Φ − G = (μ/√(2Λ))(1 − √(1 − e²)), without forming Φ.
    pub fn gap(&self, model: &GravityModel) -> f64 {
        let e2 = self.values[1].powi(2) + self.values[2].powi(2);
        let kepler = model.mu / (2.0 * self.big_lambda).sqrt();
        kepler * e2 / (1.0 + (1.0 - e2).sqrt())
    }

    pub fn eccentricity(&self) -> f64 {
        self.values[1].hypot(self.values[2])
    }

    /// True anomaly θ − g.
    pub fn true_anomaly(&self) -> f64 {
        let [theta, c, s, ..] = self.values;
        if c == 0.0 && s == 0.0 {
            theta
        } else {
            theta - s.atan2(c)
        }
    }
}

/// Applies the Lie transform of the given kind and order to a canonical
/// point. H and Λ are integrals of every generator and pass through unchanged.
pub fn apply_map(
    x: &[f64; DIM],
    kind: GeneratorKind,
    direction: Direction,
    order: u32,
    model: &GravityModel,
    opts: MapOptions,
) -> Result<[f64; DIM]> {
    let p = NonsingularPoint::from_canonical(x, model);
    Ok(map_nonsingular(&p, kind, direction, order, model, opts)?.canonical(model))
}

/// Brackets of (θ, C, S, h, λ, G) with the generators at a point.
struct Brackets {
    /// {ξ, W₁}.
    first: [f64; NONSINGULAR],
    /// {ξ, W₂}; zero unless the second-order generator was requested.
    second: [f64; NONSINGULAR],
    /// {{ξ, W₁}, W₁}.
    nested: [f64; NONSINGULAR],
}

fn brackets(
    p: &NonsingularPoint,
    kind: GeneratorKind,
    order: u32,
    model: &GravityModel,
    opts: MapOptions,
) -> Result<Brackets> {
    let jets = seed(&p.canonical(model));
    let gap = (jets[BIG_PHI] - jets[BIG_G]).with_value(p.gap(model));
    let a = aux_with_gap(&jets, gap, model);
    let (w, w2) = generators(&jets, &a, kind, order, model, opts)?;
    let xi = nonsingular_jets(&jets, &a);
    Ok(Brackets {
        first: std::array::from_fn(|k| poisson(&xi[k], &w)),
        second: w2.map_or([0.0; NONSINGULAR], |w2| {
            std::array::from_fn(|k| poisson(&xi[k], &w2))
        }),
        nested: std::array::from_fn(|k| nested_bracket(&xi[k], &w)),
    })
}

/// Applies a map to the non-singular values as the truncated Lie series
/// ξ ± J2{ξ,W₁} + ½J2²({{ξ,W₁},W₁} ± {ξ,W₂}), brackets formed at the
/// canonical image of `p`.
pub fn map_series(
    p: &NonsingularPoint,
    kind: GeneratorKind,
    direction: Direction,
    order: u32,
    model: &GravityModel,
    opts: MapOptions,
) -> Result<NonsingularPoint> {
    assert!((1..=2).contains(&order), "map order must be 1 or 2");
    let b = brackets(p, kind, order, model, opts)?;
    let (j2, sign) = (model.j2, direction.sign());
    let mut out = *p;
    for k in 0..NONSINGULAR {
        out.values[k] += sign * j2 * b.first[k];
        if order == 2 {
            out.values[k] += 0.5 * j2 * j2 * (b.nested[k] + sign * b.second[k]);
        }
    }
    Ok(out)
}

/// Applies a map to the non-singular values.
///
/// Same expansion as [`map_series`] through J2², with the nested bracket
/// replaced by the first-order bracket taken at the midpoint of the W₁ flow:
/// {ξ,W₁}(p ± ½J2{ξ,W₁}) = {ξ,W₁} ± ½J2{{ξ,W₁},W₁} + O(J2²). The two
/// differ at O(J2³), below the truncation, but the midpoint form needs no
/// second derivatives of e, which cancel badly at small eccentricity and
/// leave the physical time too rough for a 1e-12 s Newton inversion.
pub fn map_nonsingular(
    p: &NonsingularPoint,
    kind: GeneratorKind,
    direction: Direction,
    order: u32,
    model: &GravityModel,
    opts: MapOptions,
) -> Result<NonsingularPoint> {
    if order == 1 {
        return map_series(p, kind, direction, order, model, opts);
    }
    assert!(order == 2, "map order must be 1 or 2");
    let b = brackets(p, kind, order, model, opts)?;
    let (j2, sign) = (model.j2, direction.sign());
    let mut mid = *p;
    for k in 0..NONSINGULAR {
        mid.values[k] += 0.5 * sign * j2 * b.first[k];
    }
    let at_mid = brackets(&mid, kind, 1, model, opts)?;
    let mut out = *p;
    for k in 0..NONSINGULAR {
        out.values[k] += sign * j2 * at_mid.first[k] + 0.5 * j2 * j2 * sign * b.second[k];
    }
    Ok(out)
}
