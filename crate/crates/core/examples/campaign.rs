//! A two-day campaign written to a temporary directory, with the trend
//! summary printed.

use j2lab::harness::campaign::summary_text;
use j2lab::harness::{run_campaign, write_campaign, CampaignConfig};

fn main() -> j2lab::Result<()> {
    let cfg = CampaignConfig::parse(
        "# two days at two-minute cadence\n\
         horizon_days = 2\n\
         cadence = 120\n",
    )?;
    let report = run_campaign(&cfg)?;
    let dir = std::env::temp_dir().join("j2lab-campaign");
    let files = write_campaign(&report, &dir)?;
    print!("{}", summary_text(&report));
    println!("\n{} files in {}", files.len(), dir.display());
    Ok(())
}
