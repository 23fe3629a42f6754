//! One-shot assignment: load a scenario, solve the requested problem, write
//! the result as JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use obstrack_core::assignment::{
    greedy_general, greedy_unique_pairs, relaxed_pair_assignment, PairAssignment,
};
use obstrack_core::config::ScenarioConfig;
use obstrack_core::geometry::{SensorPose, TargetBelief};
use obstrack_core::measures::{evaluate, MeasureContext, MeasureKind};
use obstrack_core::sim::round_sig9;
use obstrack_core::{Error, Result};

#[derive(Args)]
pub struct AssignArgs {
    /// Scenario config; strategy and motion fields are ignored here.
    pub config: PathBuf,
    /// Problem flavour: unique, relaxed or general.
    #[arg(long, default_value = "unique")]
    pub problem: String,
    /// Measure for the general problem, snake_case (e.g. log_det).
    #[arg(long, default_value = "log_det")]
    pub measure: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EntryOut {
    target_id: u32,
    first: u32,
    second: u32,
    weight: f64,
}

#[derive(Serialize)]
struct AssignOutput {
    problem: String,
    solver: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<String>,
    total_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<EntryOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bundles: Option<BTreeMap<u32, Vec<u32>>>,
    elapsed_ms: u64,
}

fn parse_measure(name: &str) -> Result<MeasureKind> {
    Ok(match name {
        "pair_lower_bound" => MeasureKind::PairLowerBound,
        "trace" => MeasureKind::Trace,
        "log_det" => MeasureKind::LogDet,
        "rank" => MeasureKind::Rank,
        "trace_inverse" => MeasureKind::TraceInverse,
        other => return Err(Error::Config(format!("unknown measure {other:?}"))),
    })
}

fn pair_output(
    problem: &str,
    solver: &'static str,
    got: PairAssignment<f64>,
    start: Instant,
) -> AssignOutput {
    AssignOutput {
        problem: problem.into(),
        solver,
        measure: None,
        total_value: round_sig9(got.total_value),
        entries: Some(
            got.entries
                .iter()
                .map(|e| EntryOut {
                    target_id: e.target_id,
                    first: e.first,
                    second: e.second,
                    weight: round_sig9(e.weight),
                })
                .collect(),
        ),
        bundles: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn run(args: &AssignArgs) -> Result<()> {
    let config = ScenarioConfig::load(&args.config)?;
    config.validate_static()?;
    let sensors = config.sensor_poses();
    let targets = config.target_beliefs();
    let mode = config.distance_mode;
    let weight = |a: &SensorPose<f64>, b: &SensorPose<f64>, t: &TargetBelief<f64>| {
        let ctx = MeasureContext::new(*t).with_distance_mode(mode);
        evaluate(MeasureKind::PairLowerBound, &[*a, *b], &ctx).unwrap_or(0.0)
    };

    let start = Instant::now();
    let output = match args.problem.as_str() {
        "unique" => pair_output(
            "unique",
            "greedy",
            greedy_unique_pairs(&sensors, &targets, weight)?,
            start,
        ),
        "relaxed" => pair_output(
            "relaxed",
            "mwpbm",
            relaxed_pair_assignment(&sensors, &targets, weight)?,
            start,
        ),
        "general" => {
            let kind = parse_measure(&args.measure)?;
            let ctxs: Vec<_> = targets
                .iter()
                .map(|t| MeasureContext::new(*t).with_distance_mode(mode))
                .collect();
            let got = greedy_general(&sensors, &ctxs, kind)?;
            AssignOutput {
                problem: "general".into(),
                solver: "greedy",
                measure: Some(args.measure.clone()),
                total_value: round_sig9(got.total_value),
                entries: None,
                bundles: Some(got.bundles),
                elapsed_ms: start.elapsed().as_millis() as u64,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown problem {other:?}; expected unique, relaxed or general"
            )))
        }
    };

    let text = serde_json::to_string_pretty(&output)? + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
