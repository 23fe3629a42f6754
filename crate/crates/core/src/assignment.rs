//! Sensor-to-target assignment solvers.
//!
//! Three problem flavours over a common weight function `w(s_i, s_j, t)`:
//!
//! * [`greedy_unique_pairs`]: every target gets its own disjoint sensor pair.
//!   Greedy on the best remaining triple; guaranteed within 1/3 of the optimum.
//! * [`relaxed_pair_assignment`]: pairs must be distinct but may share
//!   sensors. Solved exactly as a maximum-weight bipartite matching between
//!   all `C(N, 2)` pairs and the targets, so it upper-bounds the unique-pair
//!   optimum.
//! * [`greedy_general`]: arbitrary sensor bundles per target, greedy on the
//!   globally best marginal gain of a measure; within 1/2 of the optimum for
//!   monotone submodular measures.
//!
//! [`brute_force_unique_pairs`] is the exhaustive reference used to verify the
//! greedy guarantee on small instances.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{SensorPose, TargetBelief};
use crate::matching::{max_weight_matching, WeightMatrix};
use crate::measures::{evaluate, MeasureContext, MeasureKind};
use crate::scalar::Scalar;

/// One target with its sensor pair, ids ascending within the pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PairEntry<T> {
    pub target_id: u32,
    pub first: u32,
    pub second: u32,
    pub weight: T,
}

/// Pair assignment: entries sorted by target id, `total_value` their weight sum.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PairAssignment<T> {
    pub entries: Vec<PairEntry<T>>,
    pub total_value: T,
}

/// Bundle assignment: sensor ids per target id, plus the summed measure value
/// (empty bundles contribute their regularised empty-set value).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneralAssignment<T> {
    pub bundles: BTreeMap<u32, Vec<u32>>,
    pub total_value: T,
}

fn sorted_unique_sensors<T: Scalar>(sensors: &[SensorPose<T>]) -> Result<Vec<SensorPose<T>>> {
    let mut out = sensors.to_vec();
    out.sort_by_key(|s| s.id);
    for w in out.windows(2) {
        if w[0].id == w[1].id {
            return Err(Error::DuplicateSensor(w[0].id));
        }
    }
    Ok(out)
}

fn sorted_unique_targets<T: Scalar>(targets: &[TargetBelief<T>]) -> Result<Vec<TargetBelief<T>>> {
    let mut out = targets.to_vec();
    out.sort_by_key(|t| t.id);
    for w in out.windows(2) {
        if w[0].id == w[1].id {
            return Err(Error::Config(format!("duplicate target id {}", w[0].id)));
        }
    }
    Ok(out)
}

fn finalise<T: Scalar>(mut entries: Vec<PairEntry<T>>) -> PairAssignment<T> {
    entries.sort_by_key(|e| e.target_id);
    let total_value = entries.iter().map(|e| e.weight).sum();
    PairAssignment {
        entries,
        total_value,
    }
}

/// Greedy disjoint pairing: repeatedly commits the highest-weight
/// (pair, target) triple and retires its sensors and target.
///
/// Ties resolve to the smallest `(target id, sensor id, sensor id)` triple.
/// Needs `2 * targets` sensors; attains at least a third of the optimal total.
pub fn greedy_unique_pairs<T, F>(
    sensors: &[SensorPose<T>],
    targets: &[TargetBelief<T>],
    weight: F,
) -> Result<PairAssignment<T>>
where
    T: Scalar,
    F: Fn(&SensorPose<T>, &SensorPose<T>, &TargetBelief<T>) -> T,
{
    let mut pool = sorted_unique_sensors(sensors)?;
    let mut open = sorted_unique_targets(targets)?;
    if pool.len() < 2 * open.len() {
        return Err(Error::TooFewSensors {
            sensors: pool.len(),
            targets: open.len(),
        });
    }

    let mut entries = Vec::with_capacity(open.len());
    while !open.is_empty() {
        let mut best: Option<(T, usize, usize, usize)> = None;
        for (ti, t) in open.iter().enumerate() {
            for a in 0..pool.len() {
                for b in (a + 1)..pool.len() {
                    let w = weight(&pool[a], &pool[b], t);
                    debug_assert!(w.is_finite(), "pair weights must be finite");
                    // Scan order is ascending (target, first, second), so a
                    // strict comparison implements the lexicographic tie-break.
                    if best.is_none_or(|(bw, ..)| w > bw) {
                        best = Some((w, ti, a, b));
                    }
                }
            }
        }
        let (w, ti, a, b) = best.expect("non-empty pool and targets");
        entries.push(PairEntry {
            target_id: open[ti].id,
            first: pool[a].id,
            second: pool[b].id,
            weight: w,
        });
        open.remove(ti);
        pool.remove(b);
        pool.remove(a);
    }
    Ok(finalise(entries))
}

/// Exhaustive optimum of the unique-pair problem.
///
/// Guarded to 10 sensors and 4 targets; beyond that the enumeration count is
/// no longer test-sized and [`Error::InstanceTooLarge`] is returned.
pub fn brute_force_unique_pairs<T, F>(
    sensors: &[SensorPose<T>],
    targets: &[TargetBelief<T>],
    weight: F,
) -> Result<PairAssignment<T>>
where
    T: Scalar,
    F: Fn(&SensorPose<T>, &SensorPose<T>, &TargetBelief<T>) -> T,
{
    let pool = sorted_unique_sensors(sensors)?;
    let open = sorted_unique_targets(targets)?;
    if pool.len() > 10 || open.len() > 4 {
        return Err(Error::InstanceTooLarge {
            sensors: pool.len(),
            targets: open.len(),
        });
    }
    if pool.len() < 2 * open.len() {
        return Err(Error::TooFewSensors {
            sensors: pool.len(),
            targets: open.len(),
        });
    }

    struct Search<'a, T, F> {
        pool: &'a [SensorPose<T>],
        open: &'a [TargetBelief<T>],
        weight: &'a F,
        best: Option<(T, Vec<PairEntry<T>>)>,
    }

    impl<T, F> Search<'_, T, F>
    where
        T: Scalar,
        F: Fn(&SensorPose<T>, &SensorPose<T>, &TargetBelief<T>) -> T,
    {
        fn recurse(&mut self, k: usize, used: &mut Vec<bool>, acc: &mut Vec<PairEntry<T>>, total: T) {
            if k == self.open.len() {
                // Strict improvement keeps the first (lexicographically
                // smallest) optimum found by the ordered enumeration.
                if self.best.as_ref().is_none_or(|(bt, _)| total > *bt) {
                    self.best = Some((total, acc.clone()));
                }
                return;
            }
            let t = &self.open[k];
            for a in 0..self.pool.len() {
                if used[a] {
                    continue;
                }
                for b in (a + 1)..self.pool.len() {
                    if used[b] {
                        continue;
                    }
                    used[a] = true;
                    used[b] = true;
                    let w = (self.weight)(&self.pool[a], &self.pool[b], t);
                    acc.push(PairEntry {
                        target_id: t.id,
                        first: self.pool[a].id,
                        second: self.pool[b].id,
                        weight: w,
                    });
                    self.recurse(k + 1, used, acc, total + w);
                    acc.pop();
                    used[a] = false;
                    used[b] = false;
                }
            }
        }
    }

    let mut search = Search {
        pool: &pool,
        open: &open,
        weight: &weight,
        best: None,
    };
    let mut used = vec![false; pool.len()];
    search.recurse(0, &mut used, &mut Vec::new(), T::zero());
    let (_, entries) = search.best.expect("at least one full pairing exists");
    Ok(finalise(entries))
}

/// Relaxed pairing: pairs must be distinct across targets but may share
/// sensors. Solved exactly via Hungarian matching over all `C(N, 2)` pairs.
pub fn relaxed_pair_assignment<T, F>(
    sensors: &[SensorPose<T>],
    targets: &[TargetBelief<T>],
    weight: F,
) -> Result<PairAssignment<T>>
where
    T: Scalar,
    F: Fn(&SensorPose<T>, &SensorPose<T>, &TargetBelief<T>) -> T,
{
    let pool = sorted_unique_sensors(sensors)?;
    let open = sorted_unique_targets(targets)?;
    if open.is_empty() {
        return Ok(finalise(Vec::new()));
    }
    let mut pairs = Vec::new();
    for a in 0..pool.len() {
        for b in (a + 1)..pool.len() {
            pairs.push((a, b));
        }
    }
    if pairs.len() < open.len() {
        return Err(Error::TooFewPairs {
            pairs: pairs.len(),
            targets: open.len(),
        });
    }

    let w = WeightMatrix::from_fn(pairs.len(), open.len(), |p, t| {
        let (a, b) = pairs[p];
        weight(&pool[a], &pool[b], &open[t])
    });
    let matching = max_weight_matching(&w)?;

    let entries = matching
        .pairs
        .iter()
        .map(|&(p, t)| {
            let (a, b) = pairs[p];
            PairEntry {
                target_id: open[t].id,
                first: pool[a].id,
                second: pool[b].id,
                weight: w.get(p, t),
            }
        })
        .collect();
    Ok(finalise(entries))
}

/// Greedy bundle assignment on marginal gains of a measure.
///
/// Each round commits the `(sensor, target)` pair with the globally largest
/// gain, ties to the smallest `(sensor id, target id)`; stops once every
/// sensor is placed or no gain is positive. For monotone submodular measures
/// the welfare is within 1/2 of optimal.
pub fn greedy_general<T: Scalar>(
    sensors: &[SensorPose<T>],
    contexts: &[MeasureContext<T>],
    kind: MeasureKind,
) -> Result<GeneralAssignment<T>> {
    let pool = sorted_unique_sensors(sensors)?;
    let mut ctxs = contexts.to_vec();
    ctxs.sort_by_key(|c| c.target.id);
    for w in ctxs.windows(2) {
        if w[0].target.id == w[1].target.id {
            return Err(Error::Config(format!(
                "duplicate target id {}",
                w[0].target.id
            )));
        }
    }

    let mut bundles: Vec<Vec<SensorPose<T>>> = vec![Vec::new(); ctxs.len()];
    let mut values: Vec<T> = ctxs
        .iter()
        .map(|c| evaluate(kind, &[], c))
        .collect::<Result<_>>()?;
    let mut unassigned = pool;

    while !unassigned.is_empty() && !ctxs.is_empty() {
        let mut best: Option<(T, T, usize, usize)> = None;
        for (si, s) in unassigned.iter().enumerate() {
            for (ti, ctx) in ctxs.iter().enumerate() {
                let mut candidate = bundles[ti].clone();
                candidate.push(*s);
                let value = evaluate(kind, &candidate, ctx)?;
                let gain = value - values[ti];
                // Ascending (sensor id, target id) scan with a strict
                // comparison gives the lexicographic tie-break.
                if best.is_none_or(|(bg, ..)| gain > bg) {
                    best = Some((gain, value, si, ti));
                }
            }
        }
        let (gain, value, si, ti) = best.expect("candidates exist");
        if gain <= T::zero() {
            break;
        }
        let sensor = unassigned.remove(si);
        bundles[ti].push(sensor);
        bundles[ti].sort_by_key(|s| s.id);
        values[ti] = value;
    }

    let mut out = BTreeMap::new();
    let mut total_value = T::zero();
    for (ti, ctx) in ctxs.iter().enumerate() {
        out.insert(
            ctx.target.id,
            bundles[ti].iter().map(|s| s.id).collect::<Vec<_>>(),
        );
        total_value += evaluate(kind, &bundles[ti], ctx)?;
    }
    Ok(GeneralAssignment {
        bundles: out,
        total_value,
    })
}
