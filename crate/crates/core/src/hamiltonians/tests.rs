use super::tables::{Entry, LONG_PERIOD_SECOND_ORDER, SECULAR_THIRD_ORDER};
use super::*;
use crate::dd::DoubleDouble;
use crate::dsvars::{canonical_from_nonsingular, polar_to_ds};
use crate::elements::{cartesian_to_polar, ClassicalElements};

type Dd = DoubleDouble;

/// Canonical point with prescribed e, s², angles; `offset` sets δ through G = √(μp)(1 + offset).
fn point(e: f64, s2: f64, phi: f64, g: f64, offset: f64, model: &GravityModel) -> [f64; 8] {
    let a = 6878.14;
    let big_lambda = model.mu / (2.0 * a);
    let p = model.mu * (1.0 - e * e) / (2.0 * big_lambda);
    let big_g = (model.mu * p).sqrt() * (1.0 + offset);
    let big_h = big_g * (1.0 - s2).sqrt();
    canonical_from_nonsingular(
        phi + g,
        e * g.cos(),
        e * g.sin(),
        0.3,
        100.0,
        big_g,
        big_h,
        big_lambda,
        model,
    )
}

fn prisma(model: &GravityModel) -> [f64; 8] {
    let x0 = ClassicalElements::prisma().to_cartesian(model).unwrap();
    let p = cartesian_to_polar(&x0).unwrap();
    polar_to_ds(&p, -x0.hamiltonian(model), model)
        .unwrap()
        .to_array()
}

fn to_dd(x: &[f64; 8]) -> [Dd; 8] {
    x.map(Dd::from_f64)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn w1_circular_and_equatorial_limits() {
    let model = GravityModel::default();
    let (phi, g) = (0.7, -1.1);
    let x = point(0.0, 0.6, phi, g, 1e-4, &model);
    let a = aux(&x, &model);
    let k = a.gamma * model.re * model.re / (a.rho * a.rho);
    let expected = -3.0 / 8.0 * k * 0.6 * (2.0 * g + 2.0 * phi).sin();
    assert!(rel(w1(&x, &model), expected) < 1e-13);

    let x = point(0.01, 0.0, phi, g, 1e-4, &model);
    let a = aux(&x, &model);
    let k = a.gamma * model.re * model.re / (a.rho * a.rho);
    let expected = -0.5 * k * a.e * x[PHI].sin();
    assert!(rel(w1(&x, &model), expected) < 1e-12);

    let x = point(0.0, 0.0, phi, g, 1e-4, &model);
    assert_eq!(w1(&x, &model), 0.0);
}

#[test]
fn w2_limits() {
    let model = GravityModel::default();
    let x = point(0.0, 0.0, 0.4, 0.2, 1e-4, &model);
    assert_eq!(w2(&x, &model), 0.0);

    let (phi, g, s2) = (0.4, 0.2, 0.8);
    let x = point(0.0, s2, phi, g, 1e-4, &model);
    let a = aux(&x, &model);
    let k = a.gamma * model.re.powi(4) / a.rho.powi(4) / 3840.0;
    let (d, u) = (a.delta, a.upsilon);
    let c22 = -120.0 * (39.0 * s2 - 38.0 + 36.0 * (s2 - 1.0) * d - 2.0 * (3.0 * s2 - 2.0) * u);
    let c44 = 90.0 * (u + 1.0);
    let expected =
        k * (c22 * s2 * (2.0 * g + 2.0 * phi).sin() + c44 * s2 * s2 * (4.0 * g + 4.0 * phi).sin());
    assert!(rel(w2(&x, &model), expected) < 1e-12);
}

// Term-by-term evaluation of the second-order short-period generator, with
// every bracket distributed into monomials in (s², δ, υ, e).
fn w2_oracle(x: &[Dd; 8], model: &GravityModel) -> Dd {
    let a = aux(x, model);
    let (s2, d, u, e, e2) = (a.s2, a.delta, a.upsilon, a.e, a.e2);
    let s4 = s2 * s2;
    let (phi, g) = (x[PHI], x[G_ANGLE]);
    let sin = |kg: f64, kp: f64| (g * kg + phi * kp).sin();
    let mut sum = Dd::ZERO;
    // e sin φ
    sum += (s4 * 2700.0 + s2 * 4320.0 - 4800.0 + s4 * d * 10080.0
        - s2 * d * 10080.0
        - s4 * u * 7920.0
        + s2 * u * 11520.0
        - u * 3840.0)
        * e
        * sin(0.0, 1.0);
    // e² sin 2φ
    sum += (s4 * 1800.0 - s2 * 1440.0 + s4 * d * 1440.0 - s2 * d * 1440.0) * e2 * sin(0.0, 2.0);
    // e sin(2g+φ)
    sum += (s4 * (-20250.0) + s2 * 18540.0 - s4 * d * 15120.0 + s2 * d * 15120.0 - s4 * u * 1080.0
        + s2 * u * 720.0)
        * e
        * sin(2.0, 1.0);
    // sin(2g+2φ)
    sum += (s4 * (-4680.0) + s2 * 4560.0 - s4 * d * 4320.0 + s2 * d * 4320.0 + s4 * u * 720.0
        - s2 * u * 480.0
        + e2 * (s4 * (-720.0) + s2 * 960.0 - s4 * d * 1440.0 + s2 * d * 1440.0 + s4 * u * 720.0
            - s2 * u * 480.0))
        * sin(2.0, 2.0);
    // e sin(2g+3φ)
    sum += (s4 * 750.0 - s2 * 420.0 - s4 * d * 240.0 + s2 * d * 240.0 + s4 * u * 840.0
        - s2 * u * 560.0)
        * e
        * sin(2.0, 3.0);
    // e² sin(2g+4φ)
    sum += (s4 * 450.0 - s2 * 420.0 + s4 * d * 360.0 - s2 * d * 360.0) * e2 * sin(2.0, 4.0);
    // s⁴ harmonics in 4g
    sum += (s4 * u * 180.0 + s4 * 225.0) * e * sin(4.0, 3.0);
    sum += (s4 * u * 90.0 + s4 * 90.0 + s4 * u * e2 * 90.0 + s4 * e2 * 135.0) * sin(4.0, 4.0);
    sum += (s4 * u * 36.0 + s4 * 45.0) * e * sin(4.0, 5.0);
    let ratio = a.rho.sq().recip() * (model.re * model.re);
    a.gamma * ratio.sq() * sum / 3840.0
}

#[test]
fn w2_matches_extended_precision_oracle() {
    let model = GravityModel::default();
    for x in [prisma(&model), point(0.05, 0.7, 2.1, -0.4, 3e-4, &model)] {
        let value = w2(&x, &model);
        let oracle = w2_oracle(&to_dd(&x), &model).to_f64();
        assert!(rel(value, oracle) < 1e-12, "{value} vs {oracle}");
    }
}

// Expanded integer polynomial of one entry, evaluated in double-double.
fn entry_dd(entry: &Entry, s2: Dd) -> Dd {
    let mut acc = Dd::ZERO;
    for &c in entry.expand().iter().rev() {
        let c: Dd = c.to_string().parse().unwrap();
        acc = acc * s2 + c;
    }
    acc
}

fn v2_oracle(x: &[Dd; 8], model: &GravityModel) -> Dd {
    let a = aux(x, model);
    let g = x[G_ANGLE];
    let mut sum = Dd::ZERO;
    for r in LONG_PERIOD_SECOND_ORDER.iter() {
        let w = (a.delta + 1.0).powi(r.i as u32) * (a.upsilon + 1.0).powi(r.j as u32);
        for (entry, (l, k)) in r.cols.iter().zip(tables::LONG_PERIOD_COLUMNS) {
            let trig = (g * (2.0 * l as f64)).sin();
            sum += entry_dd(entry, a.s2) * w * a.e2.powi(k + l) * a.s2.powi(l) * trig;
        }
    }
    let ratio = a.rho.sq().recip() * (model.re * model.re);
    a.gamma * ratio.sq() * sum * 3.0 / 1024.0 / a.big_delta.powi(3)
}

fn f3_oracle(x: &[Dd; 8], model: &GravityModel) -> Dd {
    let a = aux(x, model);
    let mut sum = Dd::ZERO;
    for r in SECULAR_THIRD_ORDER.iter() {
        let w = (a.delta + 1.0).powi(r.i as u32) * (a.upsilon + 1.0).powi(r.j as u32);
        for (k, entry) in r.cols.iter().enumerate() {
            sum += entry_dd(entry, a.s2) * w * a.e2.powi(k as u32);
        }
    }
    let ratio = a.rho.sq().recip() * (model.re * model.re);
    a.gamma * ratio.powi(3) * sum * 3.0 / 1024.0 / a.big_delta.sq()
}

#[test]
fn v2_and_f3_match_extended_precision_oracle() {
    let model = GravityModel::default();
    for x in [prisma(&model), point(0.05, 0.7, 2.1, -0.4, 3e-4, &model)] {
        let value = v2(&x, &model, false).unwrap();
        let oracle = v2_oracle(&to_dd(&x), &model).to_f64();
        assert!(rel(value, oracle) < 1e-12, "{value} vs {oracle}");
        let value = f3(&x, &model).unwrap();
        let oracle = f3_oracle(&to_dd(&x), &model).to_f64();
        assert!(rel(value, oracle) < 1e-12, "{value} vs {oracle}");
    }
}

#[test]
fn long_period_limits() {
    let model = GravityModel::default();
    let x = point(0.0, 0.6, 0.4, 0.2, 1e-4, &model);
    assert_eq!(v1(&x, &model).unwrap(), 0.0);
    assert_eq!(v2(&x, &model, false).unwrap(), 0.0);
    let x = point(0.01, 0.0, 0.4, 0.2, 1e-4, &model);
    assert_eq!(v1(&x, &model).unwrap(), 0.0);
    // δ = υ = 0 at G = Γ = √(μp); bracket root at s² = 14/15
    let x = point(0.01, 14.0 / 15.0, 0.4, 0.2, 0.0, &model);
    let a = aux(&x, &model);
    assert!(a.delta.abs() < 1e-15 && a.upsilon.abs() < 1e-15);
    let scale = a.gamma * model.re.powi(2) / a.rho.powi(2) * a.e2;
    assert!(v1(&x, &model).unwrap().abs() < 1e-14 * scale);
}

#[test]
fn critical_inclination_is_rejected() {
    let model = GravityModel::default();
    let x = point(0.01, 0.8, 0.4, 0.2, 0.0, &model);
    assert!(matches!(
        v1(&x, &model),
        Err(Error::CriticalInclination { .. })
    ));
    assert!(matches!(
        v2(&x, &model, false),
        Err(Error::CriticalInclination { .. })
    ));
    assert!(matches!(
        f3(&x, &model),
        Err(Error::CriticalInclination { .. })
    ));
    assert!(brouwer_v2star(5e4, 6800.0, 0.01, 0.8f64.sqrt(), 0.3, &model).is_err());
}

#[test]
fn secular_terms_closed_forms() {
    let model = GravityModel::default();
    let x = point(0.01, 2.0 / 3.0, 0.4, 0.2, 1e-4, &model);
    assert!(f1(&x, &model).abs() < 1e-15 * aux(&x, &model).gamma);

    let s2: f64 = 0.7;
    let x = point(0.0, s2, 0.4, 0.2, 0.0, &model);
    let a = aux(&x, &model);
    let k2 = a.gamma * model.re.powi(4) / a.rho.powi(4);
    let expected = k2 / 16.0 * (15.0 * s2 * s2 - 6.0 * s2 - 4.0);
    assert!(rel(f2(&x, &model), expected) < 1e-13);

    // e = 0, δ = υ = 0: only the k = 0 column, with unit weights
    let k3 = a.gamma * model.re.powi(6) / a.rho.powi(6);
    let big_delta = 3.0 * (5.0 * s2 - 4.0);
    let column: f64 = SECULAR_THIRD_ORDER.iter().map(|r| r.cols[0].eval(s2)).sum();
    let expected = k3 * 3.0 / 1024.0 / (big_delta * big_delta) * column;
    assert!(rel(f3(&x, &model).unwrap(), expected) < 1e-12);
    let q000 = -72.0 * (2.0 - 3.0 * s2).powi(3) * s2 * s2;
    assert!(rel(SECULAR_THIRD_ORDER[0].cols[0].eval(s2), q000) < 1e-14);
}

#[test]
fn secular_hamiltonian_is_kepler_at_zero_j2() {
    let model = GravityModel::default().kepler();
    let x = point(0.01, 0.7, 0.4, 0.2, 0.0, &model);
    let k = secular_hamiltonian(&x, &model, 3).unwrap();
    assert_eq!(k, x[BIG_PHI] - model.mu / (2.0 * x[BIG_LAMBDA]).sqrt());
}

#[test]
fn generators_scale_with_radius_powers() {
    let model = GravityModel::default();
    let doubled = GravityModel {
        re: 2.0 * model.re,
        ..model
    };
    let x = prisma(&model);
    assert!(rel(w1(&x, &doubled), 4.0 * w1(&x, &model)) < 1e-14);
    assert!(rel(v1(&x, &doubled).unwrap(), 4.0 * v1(&x, &model).unwrap()) < 1e-14);
    assert!(rel(w2(&x, &doubled), 16.0 * w2(&x, &model)) < 1e-14);
    assert!(
        rel(
            v2(&x, &doubled, false).unwrap(),
            16.0 * v2(&x, &model, false).unwrap()
        ) < 1e-14
    );
}

#[test]
fn short_period_generators_are_periodic_without_mean() {
    let model = GravityModel::default();
    let base = point(0.02, 0.9, 0.0, 0.5, 1e-4, &model);
    let n = 256;
    let mut mean = 0.0;
    let mut amplitude = 0.0f64;
    for k in 0..n {
        let mut x = base;
        x[PHI] = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let w = w1(&x, &model);
        mean += w / n as f64;
        amplitude = amplitude.max(w.abs());
        let mut shifted = x;
        shifted[PHI] += 2.0 * std::f64::consts::PI;
        shifted[G_ANGLE] -= 2.0 * std::f64::consts::PI;
        assert!((w1(&shifted, &model) - w).abs() < 1e-12 * amplitude.max(1e-300) + 1e-300);
        assert!(
            (w2(&shifted, &model) - w2(&x, &model)).abs() < 1e-11 * w2(&x, &model).abs().max(1e-10)
        );
    }
    assert!(mean.abs() < 1e-12 * amplitude);
}

#[test]
fn simplified_v2_keeps_value_at_zero_delta() {
    let model = GravityModel::default();
    let x = point(0.02, 0.7, 0.4, 0.2, 0.0, &model);
    let full = v2(&x, &model, false).unwrap();
    let simple = v2(&x, &model, true).unwrap();
    assert!(rel(simple, full) < 1e-14);
    let x = prisma(&model);
    let full = v2(&x, &model, false).unwrap();
    let simple = v2(&x, &model, true).unwrap();
    assert!(rel(simple, full) < 50.0 * model.j2);
}

#[test]
fn brouwer_comparator_properties() {
    let model = GravityModel::default();
    assert_eq!(
        brouwer_v2star(5e4, 6800.0, 0.0, 0.9, 0.3, &model).unwrap(),
        0.0
    );
    let s = (14.0f64 / 15.0).sqrt();
    let g = 0.37;
    let quarter = std::f64::consts::FRAC_PI_2;
    let a = brouwer_v2star(5e4, 6800.0, 0.05, s, g, &model).unwrap();
    let b = brouwer_v2star(5e4, 6800.0, 0.05, s, g + quarter, &model).unwrap();
    // sin 2g flips under g → g + π/2, sin 4g does not: the sum isolates the j = 2 term
    assert!((a + b).abs() < 1e-13 * a.abs().max(1e-300));
    let b20 = |s2: f64| (15.0 * s2 - 14.0f64).powi(2) * (15.0 * s2 - 13.0);
    let tables = coefficient_tables();
    let (_, _, poly) = &tables.brouwer[4];
    for s2 in [0.1, 0.5, 0.93] {
        assert!((s2.horner(poly) - b20(s2)).abs() < 1e-12 * b20(s2).abs().max(1.0));
    }
}
