//! Benchmark sweeps: randomized instances over a grid of problem sizes,
//! solved in parallel with per-cell derived seeds and written as sorted CSV.

use std::fs::{self, File};
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use obstrack_core::assignment::{greedy_general, greedy_unique_pairs, relaxed_pair_assignment};
use obstrack_core::geometry::{Point2, SensorPose, TargetBelief};
use obstrack_core::measures::{evaluate, MeasureContext, MeasureKind};
use obstrack_core::sim::round_sig9;
use obstrack_core::{Error, Result};

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Sweep config file.
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

/// A sweep is either disjoint pairs over a range of target counts (with the
/// fleet pinned at twice the targets) or bundles for a fixed target count
/// over a range of fleet sizes.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    PairBenchmark {
        l_range: [usize; 2],
        trials: usize,
        area: [f64; 2],
        u_max: f64,
        #[serde(default)]
        seed: u64,
    },
    GeneralBenchmark {
        l: usize,
        n_range: [usize; 2],
        n_step: usize,
        trials: usize,
        area: [f64; 2],
        u_max: f64,
        measure: MeasureKind,
        #[serde(default)]
        seed: u64,
    },
}

fn check_common(trials: usize, area: [f64; 2], u_max: f64) -> Result<()> {
    if trials < 1 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if !(area[0].is_finite() && area[1].is_finite() && area[0] < area[1]) {
        return Err(Error::Config("area bounds must be finite and ascending".into()));
    }
    if !(u_max.is_finite() && u_max >= 0.0) {
        return Err(Error::Config("u_max must be finite and non-negative".into()));
    }
    Ok(())
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        match *self {
            SweepConfig::PairBenchmark {
                l_range,
                trials,
                area,
                u_max,
                ..
            } => {
                if l_range[0] < 1 || l_range[0] > l_range[1] {
                    return Err(Error::Config(
                        "l_range must be ascending and start at 1 or more".into(),
                    ));
                }
                check_common(trials, area, u_max)
            }
            SweepConfig::GeneralBenchmark {
                l,
                n_range,
                n_step,
                trials,
                area,
                u_max,
                ..
            } => {
                if l < 1 {
                    return Err(Error::Config("l must be at least 1".into()));
                }
                if n_range[0] < 1 || n_range[0] > n_range[1] {
                    return Err(Error::Config(
                        "n_range must be ascending and start at 1 or more".into(),
                    ));
                }
                if n_step < 1 {
                    return Err(Error::Config("n_step must be at least 1".into()));
                }
                check_common(trials, area, u_max)
            }
        }
    }
}

/// Splitmix-style cell seed so every (size, trial) cell draws an independent
/// reproducible stream regardless of execution order.
fn cell_seed(seed: u64, a: u64, b: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    l: usize,
    area: [f64; 2],
    u_max: f64,
) -> (Vec<SensorPose<f64>>, Vec<TargetBelief<f64>>) {
    let targets: Vec<TargetBelief<f64>> = (1..=l as u32)
        .map(|id| {
            let p = Point2::new(rng.gen_range(area[0]..area[1]), rng.gen_range(area[0]..area[1]));
            TargetBelief::at(id, p, u_max)
        })
        .collect();
    let mut sensors: Vec<SensorPose<f64>> = Vec::with_capacity(n);
    while sensors.len() < n {
        let p = Point2::new(rng.gen_range(area[0]..area[1]), rng.gen_range(area[0]..area[1]));
        if targets.iter().all(|t| (t.mean - p).norm() > 1e-6) {
            sensors.push(SensorPose::new(sensors.len() as u32 + 1, p.x, p.y));
        }
    }
    (sensors, targets)
}

fn bound_weight(a: &SensorPose<f64>, b: &SensorPose<f64>, t: &TargetBelief<f64>) -> f64 {
    let ctx = MeasureContext::new(*t);
    evaluate(MeasureKind::PairLowerBound, &[*a, *b], &ctx).unwrap_or(0.0)
}

#[derive(Serialize)]
struct PairRow {
    l: usize,
    trial: usize,
    omega_greedy: f64,
    omega_mwpbm: f64,
    omega_mwpbm_third: f64,
}

#[derive(Serialize)]
struct GeneralRow {
    n: usize,
    trial: usize,
    /// Bundle sizes in target id order, semicolon separated.
    bundle_sizes: String,
    size_min: usize,
    size_max: usize,
    n_over_l: f64,
}

fn run_pair_benchmark(
    path: PathBuf,
    l_range: [usize; 2],
    trials: usize,
    area: [f64; 2],
    u_max: f64,
    seed: u64,
) -> Result<()> {
    let cells: Vec<(usize, usize)> = (l_range[0]..=l_range[1])
        .flat_map(|l| (0..trials).map(move |t| (l, t)))
        .collect();
    let mut rows: Vec<PairRow> = cells
        .par_iter()
        .map(|&(l, trial)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(cell_seed(seed, l as u64, trial as u64));
            let (sensors, targets) = random_instance(&mut rng, 2 * l, l, area, u_max);
            let greedy = greedy_unique_pairs(&sensors, &targets, bound_weight)?;
            let relaxed = relaxed_pair_assignment(&sensors, &targets, bound_weight)?;
            Ok(PairRow {
                l,
                trial,
                omega_greedy: round_sig9(greedy.total_value),
                omega_mwpbm: round_sig9(relaxed.total_value),
                omega_mwpbm_third: round_sig9(relaxed.total_value / 3.0),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.l, r.trial));

    let mut writer = csv::Writer::from_writer(File::create(path)?);
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(obstrack_core::Error::from)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_general_benchmark(
    path: PathBuf,
    l: usize,
    n_range: [usize; 2],
    n_step: usize,
    trials: usize,
    area: [f64; 2],
    u_max: f64,
    measure: MeasureKind,
    seed: u64,
) -> Result<()> {
    let cells: Vec<(usize, usize)> = (n_range[0]..=n_range[1])
        .step_by(n_step)
        .flat_map(|n| (0..trials).map(move |t| (n, t)))
        .collect();
    let mut rows: Vec<GeneralRow> = cells
        .par_iter()
        .map(|&(n, trial)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(cell_seed(seed, n as u64, trial as u64));
            let (sensors, targets) = random_instance(&mut rng, n, l, area, u_max);
            let ctxs: Vec<_> = targets.iter().map(|t| MeasureContext::new(*t)).collect();
            let got = greedy_general(&sensors, &ctxs, measure)?;
            let sizes: Vec<usize> = got.bundles.values().map(|b| b.len()).collect();
            Ok(GeneralRow {
                n,
                trial,
                bundle_sizes: sizes
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
                size_min: sizes.iter().copied().min().unwrap_or(0),
                size_max: sizes.iter().copied().max().unwrap_or(0),
                n_over_l: round_sig9(n as f64 / l as f64),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));

    let mut writer = csv::Writer::from_writer(File::create(path)?);
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(obstrack_core::Error::from)?;
    Ok(())
}

pub fn run(args: &BenchmarkArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let config: SweepConfig = serde_json::from_str(&text)?;
    config.validate()?;
    fs::create_dir_all(&args.out)?;
    match config {
        SweepConfig::PairBenchmark {
            l_range,
            trials,
            area,
            u_max,
            seed,
        } => run_pair_benchmark(
            args.out.join("pair_benchmark.csv"),
            l_range,
            trials,
            area,
            u_max,
            seed,
        ),
        SweepConfig::GeneralBenchmark {
            l,
            n_range,
            n_step,
            trials,
            area,
            u_max,
            measure,
            seed,
        } => run_general_benchmark(
            args.out.join("general_benchmark.csv"),
            l,
            n_range,
            n_step,
            trials,
            area,
            u_max,
            measure,
            seed,
        ),
    }
}
