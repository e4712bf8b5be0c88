//! Basin-of-attraction sweep over a barycentric lattice of the simplex.

use rayon::prelude::*;

use crate::analysis::trajectory::{run_to_target, ExactLimits, StopReason};
use crate::error::{Error, Result};
use crate::operators::GonosomalOperator;
use crate::scalar::Scalar;
use crate::state::PopulationState;

/// Lattice points `(i, j, k, l)` with `i + j + k + l = n`, skipping those
/// with `i + j = 0` or `k + l = 0`. Lexicographic order.
pub fn barycentric_lattice(n: usize) -> Vec<[usize; 4]> {
    let mut points = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i - j {
                let l = n - i - j - k;
                if i + j > 0 && k + l > 0 {
                    points.push([i, j, k, l]);
                }
            }
        }
    }
    points
}

pub fn lattice_state<T: Scalar>(counts: &[usize; 4], n: usize) -> Result<PopulationState<T>> {
    let c = |k: usize| T::from_ratio(k as i64, n as i64);
    PopulationState::new(c(counts[0]), c(counts[1]), c(counts[2]), c(counts[3]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid_per_axis: usize,
    pub eps: f64,
    pub max_iter: usize,
    pub worker_count: usize,
    pub exact_limits: ExactLimits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid_per_axis: 10,
            eps: 1e-4,
            max_iter: 100_000,
            worker_count: 1,
            exact_limits: ExactLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord<T> {
    pub lattice: [usize; 4],
    pub initial: PopulationState<T>,
    /// `None` when the budget ran out first.
    pub iterations_to_eps: Option<usize>,
    pub final_distance: T,
    pub stop_reason: StopReason,
}

/// Runs every lattice point towards `(1/2, 0, 1/2, 0)` until the L1
/// distance drops below `eps`. Output is in lattice order whatever the
/// worker count.
pub fn basin_sweep<T: Scalar>(
    op: &GonosomalOperator<T>,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord<T>>> {
    if cfg.grid_per_axis < 2 {
        return Err(Error::DomainViolation(format!(
            "grid needs at least 2 cells per axis, got {}",
            cfg.grid_per_axis
        )));
    }
    let lattice = barycentric_lattice(cfg.grid_per_axis);
    let target = PopulationState::<T>::fixed_point();
    let eps = T::from_f64_value(cfg.eps);
    let run = |counts: &[usize; 4]| -> Result<SweepRecord<T>> {
        let initial = lattice_state::<T>(counts, cfg.grid_per_axis)?;
        let outcome = run_to_target(op, &initial, &target, &eps, cfg.max_iter, &cfg.exact_limits)?;
        Ok(SweepRecord {
            lattice: *counts,
            initial,
            iterations_to_eps: outcome.reached.then_some(outcome.steps),
            final_distance: outcome.final_distance,
            stop_reason: outcome.stop_reason,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count.max(1))
        .build()
        .map_err(|e| Error::NoConvergence(format!("cannot start worker pool: {e}")))?;
    pool.install(|| lattice.par_iter().map(run).collect())
}
