//! Orbits of the unnormalized operator on R^4 either collapse to the origin
//! or escape to infinity; this module detects which.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::GonosomalOperator;
use crate::scalar::Scalar;
use crate::state::RawState4;

pub const ORIGIN_THRESHOLD: f64 = 1e-12;
pub const INFINITY_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnnormalizedVerdict {
    Origin,
    Infinity,
    /// Neither threshold crossed within the step budget.
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnnormalizedOrbit<T> {
    pub verdict: UnnormalizedVerdict,
    pub steps: usize,
    pub last: RawState4<T>,
}

/// Iterates until every coordinate is below `1e-12` (origin) or one exceeds
/// `1e12` (infinity).
pub fn classify_unnormalized_orbit<T: Scalar>(
    op: &GonosomalOperator<T>,
    start: &RawState4<T>,
    max_steps: usize,
) -> Result<UnnormalizedOrbit<T>> {
    let low = T::from_f64_value(ORIGIN_THRESHOLD);
    let high = T::from_f64_value(INFINITY_THRESHOLD);
    let mut current = start.clone();
    for steps in 0..=max_steps {
        let top = current.max_coord();
        if top < low {
            return Ok(UnnormalizedOrbit {
                verdict: UnnormalizedVerdict::Origin,
                steps,
                last: current,
            });
        }
        if top > high {
            return Ok(UnnormalizedOrbit {
                verdict: UnnormalizedVerdict::Infinity,
                steps,
                last: current,
            });
        }
        if steps == max_steps {
            break;
        }
        current = match op.apply_unnormalized(&current) {
            Ok(next) => next,
            Err(Error::Overflow { .. }) => {
                return Ok(UnnormalizedOrbit {
                    verdict: UnnormalizedVerdict::Infinity,
                    steps: steps + 1,
                    last: current,
                })
            }
            Err(e) => return Err(e),
        };
    }
    Ok(UnnormalizedOrbit {
        verdict: UnnormalizedVerdict::Undecided,
        steps: max_steps,
        last: current,
    })
}
