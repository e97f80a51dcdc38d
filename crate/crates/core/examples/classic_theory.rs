//! Physical-time theory with and without the energy calibration of the mean
//! semimajor axis, against the reference over two days.

use j2lab::classic_theory::initialize_classic;
use j2lab::elements::rsw_errors;
use j2lab::reference::{sample_reference, ReferenceOptions};
use j2lab::{ClassicalElements, GravityModel};

fn main() -> j2lab::Result<()> {
    let model = GravityModel::default();
    let x0 = ClassicalElements::prisma().to_cartesian(&model)?;
    let times: Vec<f64> = (0..=8).map(|k| k as f64 * 21_600.0).collect();
    let reference = sample_reference::<f64>(
        &x0,
        &model,
        2.0 * 86_400.0,
        &ReferenceOptions::default(),
        &times,
        &[],
    )?;

    for calibrate in [true, false] {
        let theory = initialize_classic(&x0, &model, calibrate)?;
        let mean = theory.mean_elements()?;
        println!("calibrated {calibrate}: mean a = {:.6} km", mean.a);
        if let Some(c) = theory.calibration {
            println!(
                "  Δa = {:+.3} m in {} iterations",
                (c.a - c.a_uncalibrated) * 1e3,
                c.iterations
            );
        }
        for r in &reference.at_time {
            let e = rsw_errors(&r.state(), &theory.propagate(r.t)?)?;
            println!(
                "  day {:5.2}  radial {:8.3} m  along-track {:9.3} m  cross-track {:7.3} m",
                r.t / 86_400.0,
                e.radial * 1e3,
                e.along_track * 1e3,
                e.cross_track * 1e3
            );
        }
    }
    Ok(())
}
