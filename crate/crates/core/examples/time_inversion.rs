//! Evaluates the extended-phase-space theory at prescribed physical times
//! by Newton iteration on the fictitious time.

use j2lab::eps_theory::{initialize, EpsOptions};
use j2lab::{ClassicalElements, GravityModel};

fn main() -> j2lab::Result<()> {
    let model = GravityModel::default();
    let x0 = ClassicalElements::prisma().to_cartesian(&model)?;
    let theory = initialize(&x0, &model, EpsOptions::order(2))?;
    println!("         t s                 τ  iterations    |t(τ) − t| s");
    for t in [0.0, 3_600.0, 86_400.0, 5.0 * 86_400.0, 10.0 * 86_400.0] {
        let eph = theory.ephemeris_at_time(t)?;
        println!(
            "{t:12.1} {:17.12} {:11} {:15.2e}",
            eph.tau.to_f64(),
            eph.iterations,
            (eph.t - t).to_f64().abs()
        );
    }
    Ok(())
}
