//! Campaign configuration in a flat `key = value` text format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::elements::{ClassicalElements, GravityModel};
use crate::error::{Error, Result};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "J2LAB_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    DoubleDouble,
}

impl Precision {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "f64" | "double" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            _ => Err(Error::Config(format!(
                "unknown precision {s:?} (f64 or dd)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Precision::Double => "f64",
            Precision::DoubleDouble => "dd",
        }
    }

    /// Reference tolerance used when none is configured.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Precision::Double => 1e-13,
            Precision::DoubleDouble => 1e-20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub elements: ClassicalElements,
    pub model: GravityModel,
    pub horizon_days: f64,
    /// Spacing of the physical-time samples (s); the τ grid uses the same
    /// spacing converted with the mean rate dτ/dt.
    pub cadence: f64,
    pub eps_orders: Vec<u32>,
    pub classic: bool,
    pub calibrate: bool,
    /// Also run the physical-time theory with the opposite calibration flag.
    pub compare_calibration: bool,
    pub simplified_long_period: bool,
    pub newton_tolerance: f64,
    pub newton_max_iterations: u32,
    pub reference_precision: Precision,
    pub reference_tolerance: f64,
    pub output_dir: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            elements: ClassicalElements::prisma(),
            model: GravityModel::default(),
            horizon_days: 10.0,
            cadence: 60.0,
            eps_orders: vec![1, 2],
            classic: true,
            calibrate: true,
            compare_calibration: true,
            simplified_long_period: false,
            newton_tolerance: crate::eps_theory::NEWTON_TOLERANCE,
            newton_max_iterations: crate::eps_theory::NEWTON_MAX_ITERATIONS,
            reference_precision: Precision::DoubleDouble,
            reference_tolerance: Precision::DoubleDouble.default_tolerance(),
            output_dir: PathBuf::from("campaign"),
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: {value:?} is not a number")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: {value:?} is not a boolean"))),
    }
}

fn count(key: &str, value: &str) -> Result<u32> {
    value
        .parse::<u32>()
        .map_err(|_| Error::Config(format!("{key}: {value:?} is not a count")))
}

impl CampaignConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = CampaignConfig::default();
        let mut tolerance_set = false;
        let (mut mu, mut re, mut j2) = (cfg.model.mu, cfg.model.re, cfg.model.j2);
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", line_no + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let el = &mut cfg.elements;
            match key {
                "a" => el.a = number(key, value)?,
                "e" => el.e = number(key, value)?,
                "inc_deg" => el.inc = number(key, value)?.to_radians(),
                "raan_deg" => el.raan = number(key, value)?.to_radians(),
                "argp_deg" => el.argp = number(key, value)?.to_radians(),
                "mean_anomaly_deg" => el.mean_anomaly = number(key, value)?.to_radians(),
                "mu" => mu = number(key, value)?,
                "re" => re = number(key, value)?,
                "j2" => j2 = number(key, value)?,
                "horizon_days" => cfg.horizon_days = number(key, value)?,
                "cadence" => cfg.cadence = number(key, value)?,
                "eps_orders" => {
                    cfg.eps_orders = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| count(key, s))
                        .collect::<Result<_>>()?
                }
                "classic" => cfg.classic = flag(key, value)?,
                "calibrate" => cfg.calibrate = flag(key, value)?,
                "compare_calibration" => cfg.compare_calibration = flag(key, value)?,
                "simplified_long_period" => cfg.simplified_long_period = flag(key, value)?,
                "newton_tolerance" => cfg.newton_tolerance = number(key, value)?,
                "newton_max_iterations" => cfg.newton_max_iterations = count(key, value)?,
                "reference_precision" => cfg.reference_precision = Precision::parse(value)?,
                "reference_tolerance" => {
                    cfg.reference_tolerance = number(key, value)?;
                    tolerance_set = true;
                }
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {key:?}",
                        line_no + 1
                    )))
                }
            }
        }
        if !tolerance_set {
            cfg.reference_tolerance = cfg.reference_precision.default_tolerance();
        }
        cfg.model = GravityModel::new(mu, re, j2).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies the output-directory environment override.
    pub fn with_env(mut self) -> Self {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        self.elements
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.horizon_days > 0.0) {
            return bad("horizon_days must be positive");
        }
        if !(self.cadence > 0.0) {
            return bad("cadence must be positive");
        }
        if self.eps_orders.iter().any(|o| !(1..=2).contains(o)) {
            return bad("eps_orders must be 1 or 2");
        }
        if !(self.newton_tolerance > 0.0) || self.newton_max_iterations == 0 {
            return bad("Newton tolerance and iteration cap must be positive");
        }
        if !(self.reference_tolerance > 0.0) {
            return bad("reference_tolerance must be positive");
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon_days * 86_400.0
    }

    /// The configuration in the same text format, for the audit trail.
    pub fn to_text(&self) -> String {
        let el = &self.elements;
        let orders: Vec<String> = self.eps_orders.iter().map(u32::to_string).collect();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("a", format!("{:?}", el.a));
        kv("e", format!("{:?}", el.e));
        kv("inc_deg", format!("{:?}", el.inc.to_degrees()));
        kv("raan_deg", format!("{:?}", el.raan.to_degrees()));
        kv("argp_deg", format!("{:?}", el.argp.to_degrees()));
        kv(
            "mean_anomaly_deg",
            format!("{:?}", el.mean_anomaly.to_degrees()),
        );
        kv("mu", format!("{:?}", self.model.mu));
        kv("re", format!("{:?}", self.model.re));
        kv("j2", format!("{:?}", self.model.j2));
        kv("horizon_days", format!("{:?}", self.horizon_days));
        kv("cadence", format!("{:?}", self.cadence));
        kv("eps_orders", orders.join(","));
        kv("classic", self.classic.to_string());
        kv("calibrate", self.calibrate.to_string());
        kv("compare_calibration", self.compare_calibration.to_string());
        kv(
            "simplified_long_period",
            self.simplified_long_period.to_string(),
        );
        kv("newton_tolerance", format!("{:?}", self.newton_tolerance));
        kv(
            "newton_max_iterations",
            self.newton_max_iterations.to_string(),
        );
        kv(
            "reference_precision",
            self.reference_precision.name().to_string(),
        );
        kv(
            "reference_tolerance",
            format!("{:?}", self.reference_tolerance),
        );
        kv("output_dir", self.output_dir.display().to_string());
        s
    }
}
