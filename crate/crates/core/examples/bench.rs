//! Cost per ephemeris of each theory, and of the time inversion.

use j2lab::harness::{benchmark_evaluation, CampaignConfig};

fn main() -> j2lab::Result<()> {
    let report = benchmark_evaluation(&CampaignConfig::default(), 2000)?;
    print!("{}", report.to_text());
    Ok(())
}
