//! Trace rows, CSV round-tripping and summary statistics.
//!
//! Floats are rounded to nine significant digits on the way out, which makes
//! write -> read -> write byte-stable while keeping far more precision than
//! the quantities carry.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One simulation step for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: u64,
    pub target_id: u32,
    /// Sensors selected for this target this step, ascending ids.
    pub sensor_ids: Vec<u32>,
    /// Observability lower bound of the selected set at the updated estimate.
    pub omega: f64,
    /// Euclidean distance between true and estimated position.
    pub err: f64,
    pub cov_trace: f64,
    pub true_x: f64,
    pub true_y: f64,
    pub est_x: f64,
    pub est_y: f64,
}

/// A full run: rows in (step, target id) order plus, per row, the best bound
/// any single sensor pair could have achieved at the same estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub rows: Vec<TraceRow>,
    pub omega_max: Vec<f64>,
}

/// Rounds to nine significant digits. Idempotent, so rewriting a parsed
/// value reproduces the same text.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    step: u64,
    target_id: u32,
    sensor_ids: String,
    omega: f64,
    err: f64,
    cov_trace: f64,
    true_x: f64,
    true_y: f64,
    est_x: f64,
    est_y: f64,
}

impl From<&TraceRow> for CsvRow {
    fn from(r: &TraceRow) -> Self {
        let sensor_ids = r
            .sensor_ids
            .iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(";");
        CsvRow {
            step: r.step,
            target_id: r.target_id,
            sensor_ids,
            omega: round_sig9(r.omega),
            err: round_sig9(r.err),
            cov_trace: round_sig9(r.cov_trace),
            true_x: round_sig9(r.true_x),
            true_y: round_sig9(r.true_y),
            est_x: round_sig9(r.est_x),
            est_y: round_sig9(r.est_y),
        }
    }
}

impl TryFrom<CsvRow> for TraceRow {
    type Error = Error;

    fn try_from(r: CsvRow) -> Result<TraceRow> {
        let sensor_ids = r
            .sensor_ids
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Config(format!("bad sensor id list {:?}", r.sensor_ids)))
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(TraceRow {
            step: r.step,
            target_id: r.target_id,
            sensor_ids,
            omega: r.omega,
            err: r.err,
            cov_trace: r.cov_trace,
            true_x: r.true_x,
            true_y: r.true_y,
            est_x: r.est_x,
            est_y: r.est_y,
        })
    }
}

const HEADER: [&str; 10] = [
    "step",
    "target_id",
    "sensor_ids",
    "omega",
    "err",
    "cov_trace",
    "true_x",
    "true_y",
    "est_x",
    "est_y",
];

/// Writes rows as CSV with a header, floats at nine significant digits.
/// The header is present even for an empty trace.
pub fn write_csv<W: Write>(writer: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(CsvRow::from(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize::<CsvRow>()
        .map(|row| TraceRow::try_from(row?))
        .collect()
}

/// Per-target aggregates over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub target_id: u32,
    pub mean_omega: f64,
    pub mean_err: f64,
    pub mean_cov_trace: f64,
    pub final_err: f64,
    pub final_cov_trace: f64,
    /// Steps on which the selected sensor set changed from the previous step.
    pub pair_switches: u64,
    /// Fraction of steps whose bound reached half of the best attainable
    /// pair bound at that step's estimate.
    pub frac_steps_omega_above_half_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub steps: u64,
    pub targets: Vec<TargetSummary>,
}

impl SummaryReport {
    /// Copy with every float rounded to nine significant digits.
    pub fn rounded(&self) -> SummaryReport {
        SummaryReport {
            steps: self.steps,
            targets: self
                .targets
                .iter()
                .map(|t| TargetSummary {
                    target_id: t.target_id,
                    mean_omega: round_sig9(t.mean_omega),
                    mean_err: round_sig9(t.mean_err),
                    mean_cov_trace: round_sig9(t.mean_cov_trace),
                    final_err: round_sig9(t.final_err),
                    final_cov_trace: round_sig9(t.final_cov_trace),
                    pair_switches: t.pair_switches,
                    frac_steps_omega_above_half_max: round_sig9(
                        t.frac_steps_omega_above_half_max,
                    ),
                })
                .collect(),
        }
    }
}

/// Aggregates a trace per target.
pub fn summarize(trace: &SimulationTrace) -> SummaryReport {
    struct Acc {
        n: u64,
        sum_omega: f64,
        sum_err: f64,
        sum_cov: f64,
        final_err: f64,
        final_cov: f64,
        switches: u64,
        above_half: u64,
        last_sensors: Option<Vec<u32>>,
    }

    let mut per: BTreeMap<u32, Acc> = BTreeMap::new();
    let mut steps = 0;
    for (row, &omega_max) in trace.rows.iter().zip(&trace.omega_max) {
        steps = steps.max(row.step);
        let acc = per.entry(row.target_id).or_insert(Acc {
            n: 0,
            sum_omega: 0.0,
            sum_err: 0.0,
            sum_cov: 0.0,
            final_err: 0.0,
            final_cov: 0.0,
            switches: 0,
            above_half: 0,
            last_sensors: None,
        });
        acc.n += 1;
        acc.sum_omega += row.omega;
        acc.sum_err += row.err;
        acc.sum_cov += row.cov_trace;
        acc.final_err = row.err;
        acc.final_cov = row.cov_trace;
        if row.omega >= 0.5 * omega_max {
            acc.above_half += 1;
        }
        if let Some(prev) = &acc.last_sensors {
            if *prev != row.sensor_ids {
                acc.switches += 1;
            }
        }
        acc.last_sensors = Some(row.sensor_ids.clone());
    }

    let targets = per
        .into_iter()
        .map(|(target_id, a)| {
            let n = a.n as f64;
            TargetSummary {
                target_id,
                mean_omega: a.sum_omega / n,
                mean_err: a.sum_err / n,
                mean_cov_trace: a.sum_cov / n,
                final_err: a.final_err,
                final_cov_trace: a.final_cov,
                pair_switches: a.switches,
                frac_steps_omega_above_half_max: a.above_half as f64 / n,
            }
        })
        .collect();
    SummaryReport { steps, targets }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: u64, target_id: u32, sensors: &[u32], omega: f64) -> TraceRow {
        TraceRow {
            step,
            target_id,
            sensor_ids: sensors.to_vec(),
            omega,
            err: 0.1 * step as f64,
            cov_trace: 1.0 / step as f64,
            true_x: 1.0 + step as f64,
            true_y: -2.0,
            est_x: 1.05 + step as f64,
            est_y: -1.9,
        }
    }

    #[test]
    fn round_sig9_is_idempotent() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -1234.56789012345, 1e-17, 0.0] {
            let once = round_sig9(x);
            assert_eq!(round_sig9(once), once);
        }
        assert_eq!(round_sig9(2.0), 2.0);
        assert_eq!(round_sig9(0.123456789123), 0.123456789);
    }

    #[test]
    fn csv_round_trips() {
        let rows = vec![
            row(1, 1, &[1, 3], 0.53452248),
            row(1, 2, &[], 0.0),
            row(2, 1, &[2, 4], 0.9),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "step,target_id,sensor_ids,omega,err,cov_trace,true_x,true_y,est_x,est_y"
        ));
        assert!(text.contains("1;3"));

        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[0].sensor_ids, vec![1, 3]);
        assert_eq!(back[1].sensor_ids, Vec::<u32>::new());

        // Written values are already rounded, so a second pass is identical.
        let mut buf2 = Vec::new();
        write_csv(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn empty_trace_writes_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(read_csv(buf.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn summarize_aggregates_per_target() {
        let trace = SimulationTrace {
            rows: vec![
                row(1, 1, &[1, 2], 0.8),
                row(2, 1, &[1, 2], 0.6),
                row(3, 1, &[2, 3], 0.1),
            ],
            omega_max: vec![0.8, 0.8, 0.8],
        };
        let summary = summarize(&trace);
        assert_eq!(summary.steps, 3);
        assert_eq!(summary.targets.len(), 1);
        let t = &summary.targets[0];
        assert_eq!(t.target_id, 1);
        assert!((t.mean_omega - 0.5).abs() < 1e-12);
        assert_eq!(t.pair_switches, 1);
        // Steps 1 and 2 clear half of 0.8; step 3 does not.
        assert!((t.frac_steps_omega_above_half_max - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.final_err, 0.1 * 3.0);
    }

    #[test]
    fn rounded_summary_is_stable() {
        let report = SummaryReport {
            steps: 10,
            targets: vec![TargetSummary {
                target_id: 1,
                mean_omega: 1.0 / 3.0,
                mean_err: std::f64::consts::PI,
                mean_cov_trace: 0.1234567891234,
                final_err: 2e-13,
                final_cov_trace: 5.0,
                pair_switches: 2,
                frac_steps_omega_above_half_max: 0.9,
            }],
        };
        let r = report.rounded();
        assert_eq!(r.rounded(), r);
        assert_eq!(r.targets[0].mean_omega, 0.333333333);
    }
}
