//! Extended-phase-space theory of orders 1 and 2 evaluated at fixed
//! fictitious times and compared with the reference at the same τ.

use j2lab::elements::rsw_projection;
use j2lab::eps_theory::{initialize, EpsOptions};
use j2lab::reference::{sample_reference, ReferenceOptions};
use j2lab::{ClassicalElements, DoubleDouble, GravityModel};

fn main() -> j2lab::Result<()> {
    let model = GravityModel::default();
    let x0 = ClassicalElements::prisma().to_cartesian(&model)?;
    let n = (model.mu / 6878.14f64.powi(3)).sqrt();
    let taus: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25 * 86_400.0 * n).collect();
    let opts = ReferenceOptions {
        rtol: 1e-20,
        atol: 1e-20,
        ..Default::default()
    };
    let reference =
        sample_reference::<DoubleDouble>(&x0, &model, 2.1 * 86_400.0, &opts, &[], &taus)?;

    for order in [1, 2] {
        let theory = initialize(&x0, &model, EpsOptions::order(order))?;
        let f = theory.frequencies;
        println!(
            "order {order}: dφ/dτ {:.12}, dg/dτ {:.3e}, dh/dτ {:.3e}",
            f.n_phi, f.n_g, f.n_h
        );
        println!("      days      radial m   along-track m   cross-track m     timing s");
        for r in &reference.at_tau {
            let eph = theory.osculating_at_tau(r.tau().to_f64())?;
            let reference_state = r.state();
            let e = rsw_projection(
                &reference_state,
                &(eph.state.position - reference_state.position),
            );
            println!(
                "{:10.4} {:13.6} {:15.6} {:15.6} {:12.3e}",
                r.t.to_f64() / 86_400.0,
                e.radial * 1e3,
                e.along_track * 1e3,
                e.cross_track * 1e3,
                (eph.t - r.t).to_f64()
            );
        }
    }
    Ok(())
}
