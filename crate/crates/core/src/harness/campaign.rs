//! Theory-versus-reference comparison over a campaign window.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::classic_theory::initialize_classic;
use crate::dd::DoubleDouble;
use crate::elements::{rsw_errors, rsw_projection, CartesianState};
use crate::eps_theory::{initialize, EpsOptions, MeanEpsState};
use crate::error::{Error, Result};
use crate::liealgebra::MapOptions;
use crate::reference::{sample_reference, Drift, ReferenceOptions, Sample, Stats};
use crate::scalar::Scalar;

use super::config::{CampaignConfig, Precision};
use super::trend::{fit_secular_trend, Trend};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
const KM_TO_M: f64 = 1000.0;

/// How a series is indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Uniform fictitious time; errors at equal τ (intrinsic errors).
    Tau,
    /// Uniform physical time; the extended-phase-space theories invert t(τ).
    Time,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theory {
    Eps { order: u32 },
    Classic { calibrated: bool },
}

impl Theory {
    /// Series name, used for file names and in the summary.
    pub fn series_name(self, sampling: Sampling) -> String {
        match (self, sampling) {
            (Theory::Eps { order }, Sampling::Tau) => format!("eps{order}-tau"),
            (Theory::Eps { order }, Sampling::Time) => format!("eps{order}-time"),
            (Theory::Classic { calibrated: true }, _) => "classic-calibrated".to_string(),
            (Theory::Classic { calibrated: false }, _) => "classic-uncalibrated".to_string(),
        }
    }
}

/// Theory minus reference at one sample, in metres and seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSample {
    /// Reference physical time.
    pub t: f64,
    /// Reference fictitious time.
    pub tau: f64,
    pub radial: f64,
    pub along_track: f64,
    pub cross_track: f64,
    pub rss: f64,
    /// t_theory(τ) − t_reference(τ); τ-sampled series only.
    pub timing_error: Option<f64>,
    /// Newton updates of the time inversion; t-sampled eps series only.
    pub iterations: Option<u32>,
    /// Final |t(τ) − t| of the time inversion (s).
    pub inversion_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub t: f64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub theory: Theory,
    pub sampling: Sampling,
    pub samples: Vec<ErrorSample>,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
}

/// Trend and amplitude of every component of a series.
#[derive(Clone, Debug)]
pub struct SeriesSummary {
    pub radial: Trend,
    pub along_track: Trend,
    pub cross_track: Trend,
    pub rss: Trend,
    pub timing: Option<Trend>,
    pub max_iterations: Option<u32>,
    pub mean_iterations: Option<f64>,
    pub max_inversion_residual: Option<f64>,
}

impl Series {
    fn column(&self, f: impl Fn(&ErrorSample) -> Option<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
        let pairs: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter_map(|s| f(s).map(|v| (s.t, v)))
            .collect();
        (!pairs.is_empty()).then(|| pairs.into_iter().unzip())
    }

    fn fit(&self, f: impl Fn(&ErrorSample) -> Option<f64>, period: f64) -> Result<Option<Trend>> {
        match self.column(f) {
            Some((t, y)) => fit_secular_trend(&t, &y, period).map(Some),
            None => Ok(None),
        }
    }

    pub fn summarize(&self, period: f64) -> Result<SeriesSummary> {
        let need = |trend: Option<Trend>| {
            trend.ok_or_else(|| Error::InsufficientSamples(format!("{}: no samples", self.name)))
        };
        let iterations: Vec<u32> = self.samples.iter().filter_map(|s| s.iterations).collect();
        Ok(SeriesSummary {
            radial: need(self.fit(|s| Some(s.radial), period)?)?,
            along_track: need(self.fit(|s| Some(s.along_track), period)?)?,
            cross_track: need(self.fit(|s| Some(s.cross_track), period)?)?,
            rss: need(self.fit(|s| Some(s.rss), period)?)?,
            timing: self.fit(|s| s.timing_error, period)?,
            max_iterations: iterations.iter().copied().max(),
            mean_iterations: (!iterations.is_empty()).then(|| {
                iterations.iter().map(|&k| k as f64).sum::<f64>() / iterations.len() as f64
            }),
            max_inversion_residual: self
                .samples
                .iter()
                .filter_map(|s| s.inversion_residual)
                .reduce(f64::max),
        })
    }
}

/// Reference trajectory at one grid point, reduced to double except for t.
#[derive(Clone, Copy, Debug)]
pub struct ReferencePoint {
    pub t: DoubleDouble,
    pub tau: f64,
    pub state: CartesianState,
}

#[derive(Clone, Copy, Debug)]
pub struct ReferenceSummary {
    pub precision: Precision,
    pub tolerance: f64,
    pub stats: Stats,
    pub drift: Drift,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    /// Osculating Kepler period at the epoch (s), the trend-fit cycle.
    pub period: f64,
    pub reference: ReferenceSummary,
    pub series: Vec<Series>,
}

impl CampaignReport {
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn summarize(&self, name: &str) -> Result<SeriesSummary> {
        self.series(name)
            .ok_or_else(|| Error::InsufficientSamples(format!("no series {name}")))?
            .summarize(self.period)
    }

    /// True when every theory produced every sample.
    pub fn complete(&self) -> bool {
        self.series.iter().all(|s| s.failures.is_empty())
    }
}

/// Maps `f` over `items` on all available cores, keeping the order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

fn reference_points<S: Scalar>(
    samples: &[Sample<S>],
    to_dd: impl Fn(S) -> DoubleDouble,
) -> Vec<ReferencePoint> {
    samples
        .iter()
        .map(|s| ReferencePoint {
            t: to_dd(s.t),
            tau: s.tau().value(),
            state: s.state(),
        })
        .collect()
}

/// Physical-time and τ grids of the campaign; both hold the same number of
/// points, the τ grid spaced by the cadence times the Kepler mean motion.
pub fn sample_grids(cfg: &CampaignConfig) -> (Vec<f64>, Vec<f64>) {
    let n = (cfg.horizon() / cfg.cadence).floor() as usize;
    let motion = (cfg.model.mu / cfg.elements.a.powi(3)).sqrt();
    let times = (0..=n).map(|k| k as f64 * cfg.cadence).collect();
    let taus = (0..=n).map(|k| k as f64 * cfg.cadence * motion).collect();
    (times, taus)
}

/// Integration span: the horizon plus a margin so the τ grid is reached.
fn reference_span(cfg: &CampaignConfig, period: f64) -> f64 {
    let h = cfg.horizon();
    h + (0.01 * h).max(2.0 * period) + cfg.cadence
}

fn run_reference(
    cfg: &CampaignConfig,
    x0: &CartesianState,
    period: f64,
) -> Result<(Vec<ReferencePoint>, Vec<ReferencePoint>, ReferenceSummary)> {
    let (times, taus) = sample_grids(cfg);
    let opts = ReferenceOptions {
        rtol: cfg.reference_tolerance,
        atol: cfg.reference_tolerance,
        ..Default::default()
    };
    let span = reference_span(cfg, period);
    let start = Instant::now();
    let (at_time, at_tau, stats, drift) = match cfg.reference_precision {
        Precision::Double => {
            let s = sample_reference::<f64>(x0, &cfg.model, span, &opts, &times, &taus)?;
            let dd = DoubleDouble::from_f64;
            (
                reference_points(&s.at_time, dd),
                reference_points(&s.at_tau, dd),
                s.stats,
                s.drift,
            )
        }
        Precision::DoubleDouble => {
            let s = sample_reference::<DoubleDouble>(x0, &cfg.model, span, &opts, &times, &taus)?;
            let id = |t| t;
            (
                reference_points(&s.at_time, id),
                reference_points(&s.at_tau, id),
                s.stats,
                s.drift,
            )
        }
    };
    let summary = ReferenceSummary {
        precision: cfg.reference_precision,
        tolerance: cfg.reference_tolerance,
        stats,
        drift,
        elapsed: start.elapsed(),
    };
    Ok((at_time, at_tau, summary))
}

fn to_metres(e: &crate::elements::RswError) -> [f64; 4] {
    [e.radial, e.along_track, e.cross_track, e.rss].map(|v| v * KM_TO_M)
}

fn sample_from(r: &ReferencePoint, rsw: [f64; 4]) -> ErrorSample {
    ErrorSample {
        t: r.t.to_f64(),
        tau: r.tau,
        radial: rsw[0],
        along_track: rsw[1],
        cross_track: rsw[2],
        rss: rsw[3],
        timing_error: None,
        iterations: None,
        inversion_residual: None,
    }
}

fn collect(
    theory: Theory,
    sampling: Sampling,
    results: Vec<std::result::Result<ErrorSample, Failure>>,
    start: Instant,
) -> Series {
    let (mut samples, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(f) => failures.push(f),
        }
    }
    Series {
        name: theory.series_name(sampling),
        theory,
        sampling,
        samples,
        failures,
        elapsed: start.elapsed(),
    }
}

fn failed_series(theory: Theory, sampling: Sampling, t: f64, err: &Error) -> Series {
    Series {
        name: theory.series_name(sampling),
        theory,
        sampling,
        samples: Vec::new(),
        failures: vec![Failure {
            t,
            message: format!("initialization: {err}"),
        }],
        elapsed: Duration::ZERO,
    }
}

fn failure(t: f64, err: Error) -> Failure {
    Failure {
        t,
        message: err.to_string(),
    }
}

fn eps_at_tau(theory: &MeanEpsState, r: &ReferencePoint) -> Result<ErrorSample> {
    let eph = theory.osculating_at_tau(r.tau)?;
    let delta = eph.state.position - r.state.position;
    let mut s = sample_from(r, to_metres(&rsw_projection(&r.state, &delta)));
    s.timing_error = Some((eph.t - r.t).to_f64());
    Ok(s)
}

fn eps_at_time(theory: &MeanEpsState, r: &ReferencePoint) -> Result<ErrorSample> {
    let eph = theory.ephemeris_at_time(r.t.to_f64())?;
    let mut s = sample_from(r, to_metres(&rsw_errors(&r.state, &eph.state)?));
    s.iterations = Some(eph.iterations);
    s.inversion_residual = Some((eph.t - r.t).to_f64().abs());
    Ok(s)
}

fn eps_series(
    cfg: &CampaignConfig,
    x0: &CartesianState,
    order: u32,
    at_time: &[ReferencePoint],
    at_tau: &[ReferencePoint],
) -> [Series; 2] {
    let theory = Theory::Eps { order };
    let options = eps_options(cfg, order);
    let state = match initialize(x0, &cfg.model, options) {
        Ok(s) => s,
        Err(e) => {
            return [
                failed_series(theory, Sampling::Tau, x0.t, &e),
                failed_series(theory, Sampling::Time, x0.t, &e),
            ]
        }
    };
    let start = Instant::now();
    let by_tau = par_map(at_tau, |r| {
        eps_at_tau(&state, r).map_err(|e| failure(r.t.to_f64(), e))
    });
    let tau_series = collect(theory, Sampling::Tau, by_tau, start);
    let start = Instant::now();
    let by_time = par_map(at_time, |r| {
        eps_at_time(&state, r).map_err(|e| failure(r.t.to_f64(), e))
    });
    [tau_series, collect(theory, Sampling::Time, by_time, start)]
}

pub fn eps_options(cfg: &CampaignConfig, order: u32) -> EpsOptions {
    EpsOptions {
        order,
        map: MapOptions {
            simplified_long_period: cfg.simplified_long_period,
        },
        newton_tolerance: cfg.newton_tolerance,
        newton_max_iterations: cfg.newton_max_iterations,
    }
}

fn classic_series(
    cfg: &CampaignConfig,
    x0: &CartesianState,
    calibrated: bool,
    at_time: &[ReferencePoint],
) -> Series {
    let theory = Theory::Classic { calibrated };
    let state = match initialize_classic(x0, &cfg.model, calibrated) {
        Ok(s) => s,
        Err(e) => return failed_series(theory, Sampling::Time, x0.t, &e),
    };
    let start = Instant::now();
    let results = par_map(at_time, |r| {
        let t = r.t.to_f64();
        state
            .propagate(t)
            .and_then(|x| rsw_errors(&r.state, &x))
            .map(|e| sample_from(r, to_metres(&e)))
            .map_err(|e| failure(t, e))
    });
    collect(theory, Sampling::Time, results, start)
}

/// Runs the reference and every enabled theory. Theory failures are kept
/// in the report; a reference failure aborts the campaign.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let x0 = cfg.elements.to_cartesian(&cfg.model)?;
    let period = std::f64::consts::TAU * (cfg.elements.a.powi(3) / cfg.model.mu).sqrt();
    let (at_time, at_tau, reference) = run_reference(cfg, &x0, period)?;
    let mut series = Vec::new();
    for &order in &cfg.eps_orders {
        series.extend(eps_series(cfg, &x0, order, &at_time, &at_tau));
    }
    if cfg.classic {
        series.push(classic_series(cfg, &x0, cfg.calibrate, &at_time));
        if cfg.compare_calibration {
            series.push(classic_series(cfg, &x0, !cfg.calibrate, &at_time));
        }
    }
    Ok(CampaignReport {
        config: cfg.clone(),
        period,
        reference,
        series,
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Per-series error table.
pub fn series_csv(series: &Series) -> String {
    let mut s = String::from("t_s,tau,radial_m,along_track_m,cross_track_m,rss_m,timing_error_s,iterations,inversion_residual_s\n");
    for e in &series.samples {
        let iterations = e.iterations.map(|k| k.to_string()).unwrap_or_default();
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt(e.t),
            fmt(e.tau),
            fmt(e.radial),
            fmt(e.along_track),
            fmt(e.cross_track),
            fmt(e.rss),
            opt(e.timing_error),
            iterations,
            opt(e.inversion_residual)
        )
        .unwrap();
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Radial,
    AlongTrack,
    CrossTrack,
    Rss,
    Timing,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Radial => "radial_m",
            Quantity::AlongTrack => "along_track_m",
            Quantity::CrossTrack => "cross_track_m",
            Quantity::Rss => "rss_m",
            Quantity::Timing => "timing_error_s",
        }
    }

    fn of(self, e: &ErrorSample) -> Option<f64> {
        match self {
            Quantity::Radial => Some(e.radial),
            Quantity::AlongTrack => Some(e.along_track),
            Quantity::CrossTrack => Some(e.cross_track),
            Quantity::Rss => Some(e.rss),
            Quantity::Timing => e.timing_error,
        }
    }
}

/// Series and quantities behind each figure, in overlay order.
pub fn figure_layout() -> Vec<(&'static str, Vec<(&'static str, Quantity)>)> {
    use Quantity::*;
    let rsw = |name| vec![(name, Radial), (name, AlongTrack), (name, CrossTrack)];
    vec![
        ("fig1", vec![("eps1-tau", Rss), ("classic-calibrated", Rss)]),
        (
            "fig2",
            [rsw("eps1-tau"), rsw("classic-calibrated")].concat(),
        ),
        ("fig3", vec![("eps1-tau", Timing)]),
        (
            "fig4",
            vec![
                ("eps1-time", AlongTrack),
                ("eps1-tau", AlongTrack),
                ("classic-calibrated", AlongTrack),
            ],
        ),
        (
            "fig5",
            vec![("eps2-tau", AlongTrack), ("classic-calibrated", AlongTrack)],
        ),
        ("fig6", vec![("eps2-tau", Timing)]),
        (
            "fig7",
            vec![("eps2-time", AlongTrack), ("eps2-tau", AlongTrack)],
        ),
    ]
}

/// Long-format table for one figure: series, quantity, days, value.
pub fn figure_csv(report: &CampaignReport, entries: &[(&str, Quantity)]) -> String {
    let mut s = String::from("series,quantity,t_days,value\n");
    for &(name, q) in entries {
        let Some(series) = report.series(name) else {
            continue;
        };
        for e in &series.samples {
            if let Some(v) = q.of(e) {
                writeln!(
                    s,
                    "{name},{},{},{}",
                    q.name(),
                    fmt(e.t / SECONDS_PER_DAY),
                    fmt(v)
                )
                .unwrap();
            }
        }
    }
    s
}

fn trend_line(s: &mut String, label: &str, unit: &str, t: &Trend) {
    writeln!(
        s,
        "  {label:<14} slope {:+.4e} ± {:.1e} {unit}/day  amplitude {:.4e} {unit}  residual rms {:.4e} {unit}",
        t.slope, t.stderr, t.amplitude, t.residual_rms
    )
    .unwrap();
}

/// Human-readable summary; includes run times, so unlike the CSV files it
/// is not reproducible byte for byte.
pub fn summary_text(report: &CampaignReport) -> String {
    let mut s = String::new();
    let r = &report.reference;
    writeln!(
        s,
        "campaign over {} days, cadence {} s",
        report.config.horizon_days, report.config.cadence
    )
    .unwrap();
    writeln!(
        s,
        "reference: {:?} tol {:e}, {} steps ({} rejected), energy drift {:.2e}, polar momentum drift {:.2e}, {:.2?}",
        r.precision, r.tolerance, r.stats.accepted, r.stats.rejected, r.drift.energy, r.drift.polar_momentum, r.elapsed
    )
    .unwrap();
    for series in &report.series {
        writeln!(
            s,
            "\n[{}] {} samples, {} failures, {:.2?}",
            series.name,
            series.samples.len(),
            series.failures.len(),
            series.elapsed
        )
        .unwrap();
        for f in series.failures.iter().take(5) {
            writeln!(s, "  FAILED at t = {} s: {}", f.t, f.message).unwrap();
        }
        match series.summarize(report.period) {
            Ok(sum) => {
                trend_line(&mut s, "radial", "m", &sum.radial);
                trend_line(&mut s, "along-track", "m", &sum.along_track);
                trend_line(&mut s, "cross-track", "m", &sum.cross_track);
                trend_line(&mut s, "rss", "m", &sum.rss);
                if let Some(t) = &sum.timing {
                    trend_line(&mut s, "timing", "s", t);
                }
                if let (Some(max), Some(mean)) = (sum.max_iterations, sum.mean_iterations) {
                    writeln!(s, "  newton         max {max} iterations, mean {mean:.3}").unwrap();
                }
                if let Some(res) = sum.max_inversion_residual {
                    writeln!(s, "  newton         worst |t(τ) − t| {res:.3e} s").unwrap();
                }
            }
            Err(e) => writeln!(s, "  no trend: {e}").unwrap(),
        }
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes the series tables, figure tables, configuration and summary
/// into `dir`, returning the files written.
pub fn write_campaign(report: &CampaignReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        write(&path, &text)?;
        files.push(path);
        Ok(())
    };
    put("config.txt".into(), report.config.to_text())?;
    for series in &report.series {
        put(format!("{}.csv", series.name), series_csv(series))?;
    }
    let mut failures = String::from("series,t_s,message\n");
    for series in &report.series {
        for f in &series.failures {
            writeln!(
                failures,
                "{},{},\"{}\"",
                series.name,
                fmt(f.t),
                f.message.replace('"', "'")
            )
            .unwrap();
        }
    }
    put("failures.csv".into(), failures)?;
    for (name, entries) in figure_layout() {
        put(format!("{name}.csv"), figure_csv(report, &entries))?;
    }
    put("summary.txt".into(), summary_text(report))?;
    Ok(files)
}
