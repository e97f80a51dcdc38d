use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use j2lab::classic_theory::initialize_classic;
use j2lab::eps_theory::initialize;
use j2lab::harness::campaign::{eps_options, sample_grids};
use j2lab::harness::{benchmark_evaluation, run_campaign, write_campaign, CampaignConfig};
use j2lab::reference::{sample_reference, ReferenceOptions};
use j2lab::{CartesianState, DoubleDouble, Error, Result};

#[derive(Parser)]
#[command(
    name = "j2lab",
    about = "Main-problem satellite theories against a numerical reference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one theory on the campaign time grid and write its ephemeris.
    Propagate {
        /// key = value configuration file; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        theory: TheoryArg,
        /// Output CSV; defaults to <output_dir>/ephemeris-<theory>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every enabled theory with the reference and write the tables.
    Campaign {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Measure the evaluation cost of the theories.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of epochs timed per theory.
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Eps1,
    Eps2,
    Classic,
    Reference,
}

impl TheoryArg {
    fn name(self) -> &'static str {
        match self {
            TheoryArg::Eps1 => "eps1",
            TheoryArg::Eps2 => "eps2",
            TheoryArg::Classic => "classic",
            TheoryArg::Reference => "reference",
        }
    }
}

fn load(path: Option<&Path>) -> Result<CampaignConfig> {
    let cfg = match path {
        Some(p) => CampaignConfig::from_file(p)?,
        None => CampaignConfig::default(),
    };
    Ok(cfg.with_env())
}

fn ephemeris_csv(rows: &[(f64, Option<f64>, CartesianState)]) -> String {
    let mut s = String::from("t,tau,x,y,z,vx,vy,vz\n");
    for (t, tau, x) in rows {
        let tau = tau.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let (p, v) = (x.position, x.velocity);
        writeln!(
            s,
            "{t:.16e},{tau},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.x, p.y, p.z, v.x, v.y, v.z
        )
        .unwrap();
    }
    s
}

fn propagate(cfg: &CampaignConfig, theory: TheoryArg, out: Option<PathBuf>) -> Result<()> {
    let x0 = cfg.elements.to_cartesian(&cfg.model)?;
    let (times, _) = sample_grids(cfg);
    let rows: Vec<(f64, Option<f64>, CartesianState)> = match theory {
        TheoryArg::Eps1 | TheoryArg::Eps2 => {
            let order = if matches!(theory, TheoryArg::Eps1) {
                1
            } else {
                2
            };
            let m = initialize(&x0, &cfg.model, eps_options(cfg, order))?;
            times
                .iter()
                .map(|&t| {
                    m.ephemeris_at_time(t)
                        .map(|e| (t, Some(e.tau.to_f64()), e.state))
                })
                .collect::<Result<_>>()?
        }
        TheoryArg::Classic => {
            let m = initialize_classic(&x0, &cfg.model, cfg.calibrate)?;
            times
                .iter()
                .map(|&t| m.propagate(t).map(|x| (t, None, x)))
                .collect::<Result<_>>()?
        }
        TheoryArg::Reference => {
            let opts = ReferenceOptions {
                rtol: cfg.reference_tolerance,
                atol: cfg.reference_tolerance,
                ..Default::default()
            };
            let span = times.last().copied().unwrap_or(0.0);
            let s = sample_reference::<DoubleDouble>(&x0, &cfg.model, span, &opts, &times, &[])?;
            s.at_time
                .iter()
                .map(|p| (p.t.to_f64(), Some(p.tau().to_f64()), p.state()))
                .collect()
        }
    };
    let path = out.unwrap_or_else(|| {
        cfg.output_dir
            .join(format!("ephemeris-{}.csv", theory.name()))
    });
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, ephemeris_csv(&rows))?;
    println!("{} epochs written to {}", rows.len(), path.display());
    Ok(())
}

fn campaign(cfg: &CampaignConfig) -> Result<()> {
    let report = run_campaign(cfg)?;
    let files = write_campaign(&report, &cfg.output_dir)?;
    print!("{}", j2lab::harness::campaign::summary_text(&report));
    println!(
        "\n{} files written to {}",
        files.len(),
        cfg.output_dir.display()
    );
    if report.complete() {
        Ok(())
    } else {
        let failed: usize = report.series.iter().map(|s| s.failures.len()).sum();
        Err(Error::DegenerateState(format!(
            "{failed} samples failed; see failures.csv"
        )))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Propagate {
            config,
            theory,
            out,
        } => propagate(&load(config.as_deref())?, theory, out),
        Command::Campaign { config } => campaign(&load(config.as_deref())?),
        Command::Bench { config, epochs } => {
            let report = benchmark_evaluation(&load(config.as_deref())?, epochs)?;
            print!("{}", report.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("j2lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
