//! Tracking simulation runner: trace.csv plus summary.json in one directory.

use std::fs::{self, File};
use std::path::PathBuf;

use clap::Args;

use obstrack_core::config::ScenarioConfig;
use obstrack_core::sim::{run_scenario, summarize, write_csv};
use obstrack_core::Result;

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario config.
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let config = ScenarioConfig::load(&args.config)?;
    config.validate()?;
    let trace = run_scenario(&config, args.seed.unwrap_or(config.seed))?;

    fs::create_dir_all(&args.out)?;
    write_csv(File::create(args.out.join("trace.csv"))?, &trace.rows)?;

    let summary = summarize(&trace).rounded();
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    fs::write(args.out.join("summary.json"), text)?;
    Ok(())
}
