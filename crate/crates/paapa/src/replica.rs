//! Replica farms: independent repetitions of a growth experiment on derived
//! seeds, optionally in parallel.
//!
//! Each replica owns its state and its own ChaCha8 stream seeded with
//! [`crate::seed::derive_seed`]`(base, replica)`. Results come back indexed
//! by replica, so merges are performed in replica order and the outcome does
//! not depend on the worker count.

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{grow_observed, FnObserver, GraphState, Observer};
use crate::params::ModelParams;
use crate::seed::replica_rng;
use crate::stats::DegreeHistogram;

/// Runs `params.replicas` independent growths and maps each finished replica
/// through `collect`. Workers run on the current rayon pool; wrap the call in
/// a scoped pool to pin the worker count.
pub fn run_replicas<T, F>(params: &ModelParams, collect: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &GraphState) -> T + Sync,
{
    params.validate()?;
    (0..params.replicas as u64)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(params.seed, replica);
            let state = crate::graph::grow(params, &mut rng)?;
            Ok(collect(replica, &state))
        })
        .collect()
}

/// Per-checkpoint observables of one replica.
#[derive(Debug, Clone)]
pub struct CheckpointRecord {
    pub time: u64,
    pub histogram: DegreeHistogram,
    /// Degree of the tracked vertex at this time (0 while it is not born).
    pub tracked_degree: u64,
    pub max_degree: u32,
}

/// One replica's observation trail plus its final state.
#[derive(Debug)]
pub struct ReplicaRun {
    pub replica: u64,
    pub seed: u64,
    pub checkpoints: Vec<CheckpointRecord>,
    pub state: GraphState,
}

/// Grows every replica, recording a histogram, the tracked vertex's degree
/// and the maximum degree at each checkpoint.
pub fn run_replicas_observed(
    params: &ModelParams,
    checkpoints: &[u64],
    tracked_vertex: u64,
) -> Result<Vec<ReplicaRun>> {
    params.validate()?;
    (0..params.replicas as u64)
        .into_par_iter()
        .map(|replica| {
            let seed = crate::seed::derive_seed(params.seed, replica);
            let mut rng = replica_rng(params.seed, replica);
            let mut records = Vec::with_capacity(checkpoints.len());
            let state = {
                let mut observer = FnObserver::new(checkpoints.to_vec(), |state: &GraphState| {
                    let tracked_degree = if tracked_vertex <= state.time() {
                        state.degree(tracked_vertex as u32) as u64
                    } else {
                        0
                    };
                    records.push(CheckpointRecord {
                        time: state.time(),
                        histogram: DegreeHistogram::from_state(state),
                        tracked_degree,
                        max_degree: state.max_degree(),
                    });
                });
                let mut hooks: Vec<&mut dyn Observer> = vec![&mut observer];
                grow_observed(params, &mut hooks, &mut rng)?
            };
            Ok(ReplicaRun {
                replica,
                seed,
                checkpoints: records,
                state,
            })
        })
        .collect()
}

/// Merged view over replicas: summed histograms and replica-mean tracked
/// degree per checkpoint. Merging is associative count addition in replica
/// order.
#[derive(Debug, Clone)]
pub struct MergedCheckpoint {
    pub time: u64,
    pub histogram: DegreeHistogram,
    pub mean_tracked_degree: f64,
    pub replicas: u64,
}

pub fn merge_checkpoints(runs: &[ReplicaRun]) -> Vec<MergedCheckpoint> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let mut merged: Vec<MergedCheckpoint> = first
        .checkpoints
        .iter()
        .map(|record| MergedCheckpoint {
            time: record.time,
            histogram: DegreeHistogram::default(),
            mean_tracked_degree: 0.0,
            replicas: runs.len() as u64,
        })
        .collect();
    for run in runs {
        for (slot, record) in merged.iter_mut().zip(run.checkpoints.iter()) {
            debug_assert_eq!(slot.time, record.time);
            slot.histogram.merge(&record.histogram);
            slot.mean_tracked_degree += record.tracked_degree as f64;
        }
    }
    for slot in &mut merged {
        slot.mean_tracked_degree /= runs.len() as f64;
    }
    merged
}

/// Runs `f` on a dedicated rayon pool of `threads` workers (both the replica
/// farm and anything else it spawns).
pub fn with_worker_count<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Variant;

    fn params() -> ModelParams {
        ModelParams::new(2, 0.5, Variant::PaApa, 150, 42).with_replicas(6)
    }

    #[test]
    fn merged_totals_are_additive() {
        let runs = run_replicas_observed(&params(), &[50, 150], 2).unwrap();
        let merged = merge_checkpoints(&runs);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].histogram.total_vertices(), 6 * 50);
        assert_eq!(merged[1].histogram.total_vertices(), 6 * 150);
        assert_eq!(merged[1].histogram.degree_sum(), 6 * 2 * 2 * 150);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let one = with_worker_count(1, || run_replicas_observed(&params(), &[75, 150], 2).unwrap());
        let many = with_worker_count(8, || run_replicas_observed(&params(), &[75, 150], 2).unwrap());
        for (a, b) in one.iter().zip(many.iter()) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.state.endpoints(), b.state.endpoints());
            for (ca, cb) in a.checkpoints.iter().zip(b.checkpoints.iter()) {
                assert_eq!(ca.histogram, cb.histogram);
                assert_eq!(ca.tracked_degree, cb.tracked_degree);
            }
        }
    }

    #[test]
    fn replicas_differ_from_each_other() {
        let runs = run_replicas_observed(&params(), &[150], 2).unwrap();
        let distinct: std::collections::HashSet<_> =
            runs.iter().map(|r| r.state.endpoints().to_vec()).collect();
        assert_eq!(distinct.len(), runs.len());
    }
}
