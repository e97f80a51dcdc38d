//! Campaign driver: configuration, comparison against the reference,
//! trend fitting and cost measurement.

pub mod bench;
pub mod campaign;
pub mod config;
pub mod trend;

pub use bench::{benchmark_evaluation, CostReport};
pub use campaign::{
    run_campaign, write_campaign, CampaignReport, ErrorSample, Series, SeriesSummary,
};
pub use config::{CampaignConfig, Precision, OUTPUT_DIR_ENV};
pub use trend::{fit_secular_trend, Trend};
