use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{reduce, GonosomalOperator};
use crate::scalar::{ArithMode, Scalar};
use crate::state::{l1_distance, PopulationState, ReducedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    Converged,
    BudgetExhausted,
    DegenerateSex,
    ExactCapExceeded,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StopReason::Converged => "Converged",
            StopReason::BudgetExhausted => "BudgetExhausted",
            StopReason::DegenerateSex => "DegenerateSex",
            StopReason::ExactCapExceeded => "ExactCapExceeded",
        };
        f.write_str(name)
    }
}

/// Limits on exact iteration.
///
/// Component size roughly doubles with every step of a degree-two rational
/// map, so both a step count and a bit budget are enforced. Ignored in
/// float mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_steps: usize,
    pub max_bits: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_steps: 64,
            max_bits: 1 << 16,
        }
    }
}

impl ExactLimits {
    /// Whether another exact step may be taken from a state of `bits` after `steps` steps.
    pub fn allows<T: Scalar>(&self, steps: usize, bits: u64) -> bool {
        T::MODE != ArithMode::Exact || (steps < self.max_steps && bits <= self.max_bits)
    }

    pub fn check<T: Scalar>(&self, steps: usize, s: &PopulationState<T>) -> Result<()> {
        let bits = s.bit_size();
        if self.allows::<T>(steps, bits) {
            Ok(())
        } else {
            Err(Error::ExactIterationCapExceeded { steps, bits })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateOptions<T> {
    pub max_steps: usize,
    pub eps: T,
    /// Converge towards this state; without it successive steps are compared.
    pub target: Option<PopulationState<T>>,
    pub exact_limits: ExactLimits,
}

impl<T: Scalar> IterateOptions<T> {
    pub fn new(max_steps: usize, eps: T) -> Self {
        Self {
            max_steps,
            eps,
            target: None,
            exact_limits: ExactLimits::default(),
        }
    }

    pub fn with_target(mut self, target: PopulationState<T>) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_exact_limits(mut self, limits: ExactLimits) -> Self {
        self.exact_limits = limits;
        self
    }
}

/// A recorded orbit.
///
/// `states[k + 1]` is the image of `states[k]`, and `reduced[k]` is the ratio
/// pair of `states[k + 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub states: Vec<PopulationState<T>>,
    pub reduced: Vec<ReducedState<T>>,
    pub stop_reason: StopReason,
    pub steps_taken: usize,
    /// Distance used by the stopping rule at the last recorded state.
    pub final_distance: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &PopulationState<T> {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// `alpha + beta` along the reduced orbit.
    pub fn reduced_sums(&self) -> Vec<T> {
        self.reduced.iter().map(ReducedState::sum).collect()
    }
}

/// Iterates `op` from `s0`, recording every state.
///
/// Degeneracy and the exact-arithmetic cap end the orbit with the matching
/// stop reason instead of failing. Errors are returned only for an operator
/// that cannot act on population states at all.
pub fn iterate<T: Scalar>(
    op: &GonosomalOperator<T>,
    s0: &PopulationState<T>,
    opts: &IterateOptions<T>,
) -> Result<Trajectory<T>> {
    let mut states = vec![s0.clone()];
    let distance = |s: &PopulationState<T>, prev: &PopulationState<T>| match &opts.target {
        Some(t) => l1_distance(s, t),
        None => l1_distance(s, prev),
    };
    let mut final_distance = match &opts.target {
        Some(t) => l1_distance(s0, t),
        None => T::zero(),
    };
    let mut stop_reason = StopReason::BudgetExhausted;
    if opts.target.is_some() && final_distance < opts.eps {
        stop_reason = StopReason::Converged;
    } else {
        for step in 0..opts.max_steps {
            let current = states.last().expect("nonempty");
            if opts.exact_limits.check(step, current).is_err() {
                stop_reason = StopReason::ExactCapExceeded;
                break;
            }
            let next = match op.apply(current) {
                Ok(next) => next,
                Err(Error::DegenerateSex(_)) => {
                    stop_reason = StopReason::DegenerateSex;
                    break;
                }
                Err(e) => return Err(e),
            };
            final_distance = distance(&next, current);
            states.push(next);
            if final_distance < opts.eps {
                stop_reason = StopReason::Converged;
                break;
            }
        }
    }
    let reduced = states
        .iter()
        .skip(2)
        .map_while(|s| reduce(s).ok())
        .collect();
    Ok(Trajectory {
        steps_taken: states.len() - 1,
        states,
        reduced,
        stop_reason,
        final_distance,
    })
}

/// Outcome of an unrecorded run towards a target.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<T> {
    pub steps: usize,
    pub reached: bool,
    pub final_distance: T,
    pub stop_reason: StopReason,
}

/// Like [`iterate`] with a target, but keeps only the current state.
pub fn run_to_target<T: Scalar>(
    op: &GonosomalOperator<T>,
    s0: &PopulationState<T>,
    target: &PopulationState<T>,
    eps: &T,
    max_steps: usize,
    limits: &ExactLimits,
) -> Result<RunOutcome<T>> {
    let mut current = s0.clone();
    let mut dist = l1_distance(&current, target);
    let mut steps = 0;
    let mut stop_reason = StopReason::BudgetExhausted;
    if dist < *eps {
        stop_reason = StopReason::Converged;
    } else {
        while steps < max_steps {
            if limits.check(steps, &current).is_err() {
                stop_reason = StopReason::ExactCapExceeded;
                break;
            }
            current = match op.apply(&current) {
                Ok(next) => next,
                Err(Error::DegenerateSex(_)) => {
                    stop_reason = StopReason::DegenerateSex;
                    break;
                }
                Err(e) => return Err(e),
            };
            steps += 1;
            dist = l1_distance(&current, target);
            if dist < *eps {
                stop_reason = StopReason::Converged;
                break;
            }
        }
    }
    Ok(RunOutcome {
        steps,
        reached: stop_reason == StopReason::Converged,
        final_distance: dist,
        stop_reason,
    })
}
