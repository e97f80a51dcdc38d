//! Integrates the main problem for one day in double-double and writes the
//! trajectory, with τ, to a CSV file.

use j2lab::reference::{ReferenceOptions, ReferenceTrajectory};
use j2lab::{ClassicalElements, DoubleDouble, GravityModel};

fn main() -> j2lab::Result<()> {
    let model = GravityModel::default();
    let x0 = ClassicalElements::prisma().to_cartesian(&model)?;
    let opts = ReferenceOptions {
        rtol: 1e-20,
        atol: 1e-20,
        ..Default::default()
    };
    let traj = ReferenceTrajectory::<DoubleDouble>::propagate(&x0, &model, 86_400.0, &opts)?;
    println!(
        "{} steps, relative drift: energy {:.1e}, polar momentum {:.1e}",
        traj.stats.accepted, traj.drift.energy, traj.drift.polar_momentum
    );
    let x = traj.state_at_time(86_400.0)?;
    println!("r(1 day) = {:.9} km", x.position.norm());

    let path = std::env::temp_dir().join("j2lab-reference.csv");
    let times: Vec<f64> = (0..=1440).map(|k| k as f64 * 60.0).collect();
    traj.write_csv(&path, &times)?;
    println!("written to {}", path.display());
    Ok(())
}
