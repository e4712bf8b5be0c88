//! Population states on the simplex, reduced ratio states and raw states on R^4.

use std::fmt;

use crate::error::{Error, Result, Sex};
use crate::scalar::Scalar;

/// Genotype frequencies `(x, y, u, v)` of `{XX, XXh; XY, XhY}`.
///
/// A value of this type always lies on the simplex with both sub-populations
/// present: all coordinates are nonnegative, they sum to one (exactly in
/// rational mode), and neither `x + y` nor `u + v` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState<T> {
    x: T,
    y: T,
    u: T,
    v: T,
}

impl<T: Scalar> PopulationState<T> {
    /// Validates raw coordinates.
    ///
    /// When the sum is off by at most `tol` the state is re-normalized by the
    /// sum. In float mode a sum already within a few ulps of one is kept as is,
    /// which makes validation idempotent.
    pub fn validate(x: T, y: T, u: T, v: T, tol: T) -> Result<Self> {
        let coords = [x, y, u, v];
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite_value() {
                return Err(Error::NonFinite { index });
            }
            if c.is_negative() {
                return Err(Error::NegativeComponent {
                    index,
                    value: c.to_literal(),
                });
            }
        }
        let [x, y, u, v] = coords;
        let sum = x.clone() + y.clone() + u.clone() + v.clone();
        let off = (sum.clone() - T::one()).abs();
        if off > tol {
            return Err(Error::SumOutOfTolerance {
                sum: sum.to_literal(),
            });
        }
        let floor = T::theta_floor();
        if x.clone() + y.clone() <= floor {
            return Err(Error::DegenerateSex(Sex::Female));
        }
        if u.clone() + v.clone() <= floor {
            return Err(Error::DegenerateSex(Sex::Male));
        }
        if off > T::slack(8.0 * f64::EPSILON) {
            Ok(Self {
                x: x / sum.clone(),
                y: y / sum.clone(),
                u: u / sum.clone(),
                v: v / sum,
            })
        } else {
            Ok(Self { x, y, u, v })
        }
    }

    /// Validates with the default tolerance of the arithmetic mode.
    pub fn new(x: T, y: T, u: T, v: T) -> Result<Self> {
        Self::validate(x, y, u, v, T::sum_tolerance())
    }

    /// Normalizes nonnegative weights by their sum.
    pub fn from_weights(x: T, y: T, u: T, v: T) -> Result<Self> {
        let sum = x.clone() + y.clone() + u.clone() + v.clone();
        if sum <= T::zero() {
            // all-zero weights: report whichever half is empty
            return Self::validate(x, y, u, v, T::sum_tolerance());
        }
        Self::validate(
            x / sum.clone(),
            y / sum.clone(),
            u / sum.clone(),
            v / sum,
            T::sum_tolerance(),
        )
    }

    /// The globally attracting fixed point `(1/2, 0, 1/2, 0)`.
    pub fn fixed_point() -> Self {
        let half = T::from_ratio(1, 2);
        Self {
            x: half.clone(),
            y: T::zero(),
            u: half,
            v: T::zero(),
        }
    }

    pub fn x(&self) -> &T {
        &self.x
    }

    pub fn y(&self) -> &T {
        &self.y
    }

    pub fn u(&self) -> &T {
        &self.u
    }

    pub fn v(&self) -> &T {
        &self.v
    }

    pub fn to_array(&self) -> [T; 4] {
        [
            self.x.clone(),
            self.y.clone(),
            self.u.clone(),
            self.v.clone(),
        ]
    }

    pub fn female_total(&self) -> T {
        self.x.clone() + self.y.clone()
    }

    pub fn male_total(&self) -> T {
        self.u.clone() + self.v.clone()
    }

    /// Largest bit size over the four coordinates.
    pub fn bit_size(&self) -> u64 {
        [&self.x, &self.y, &self.u, &self.v]
            .iter()
            .map(|c| c.bit_size())
            .max()
            .unwrap_or(0)
    }

    /// Rounds every coordinate to binary64 and re-normalizes exactly.
    pub fn reanchor(&self) -> Result<Self> {
        Self::from_weights(
            self.x.reanchor(),
            self.y.reanchor(),
            self.u.reanchor(),
            self.v.reanchor(),
        )
    }

    pub fn to_f64(&self) -> PopulationState<f64> {
        PopulationState {
            x: self.x.as_f64(),
            y: self.y.as_f64(),
            u: self.u.as_f64(),
            v: self.v.as_f64(),
        }
    }

    /// Swaps two coordinates without re-validating. Used to build corrupted
    /// orbits when testing the checkers themselves.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut c = self.to_array();
        c.swap(a, b);
        let [x, y, u, v] = c;
        Self { x, y, u, v }
    }
}

impl<T: Scalar> fmt::Display for PopulationState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.x.to_literal(),
            self.y.to_literal(),
            self.u.to_literal(),
            self.v.to_literal()
        )
    }
}

/// Sum of absolute coordinate differences.
pub fn l1_distance<T: Scalar>(a: &PopulationState<T>, b: &PopulationState<T>) -> T {
    (a.x.clone() - b.x.clone()).abs()
        + (a.y.clone() - b.y.clone()).abs()
        + (a.u.clone() - b.u.clone()).abs()
        + (a.v.clone() - b.v.clone()).abs()
}

/// Ratios `alpha = y/x` and `beta = v/u`.
///
/// Pairs are not checked on construction: the reduction of an arbitrary state
/// may fall outside the box `0 <= alpha <= 4, 0 <= beta <= 1`, and the
/// checkers need to build such pairs on purpose.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> ReducedState<T> {
    pub fn new(alpha: T, beta: T) -> Self {
        Self { alpha, beta }
    }

    /// Builds a pair, rejecting anything outside the box `[0,4] x [0,1]`.
    pub fn checked(alpha: T, beta: T) -> Result<Self> {
        let r = Self { alpha, beta };
        if r.in_domain() {
            Ok(r)
        } else {
            Err(Error::DomainViolation(format!(
                "{r} lies outside [0,4] x [0,1]"
            )))
        }
    }

    pub fn origin() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::zero(),
        }
    }

    /// Membership in `[0,4] x [0,1]`.
    pub fn in_domain(&self) -> bool {
        self.is_nonnegative() && self.alpha <= T::from_ratio(4, 1) && self.beta <= T::one()
    }

    /// Membership in the absorbing box `[0,2] x [0,1]`.
    pub fn in_absorbing_box(&self) -> bool {
        self.is_nonnegative() && self.alpha <= T::from_ratio(2, 1) && self.beta <= T::one()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.alpha.is_negative() && !self.beta.is_negative()
    }

    pub fn sum(&self) -> T {
        self.alpha.clone() + self.beta.clone()
    }

    pub fn to_f64(&self) -> ReducedState<f64> {
        ReducedState {
            alpha: self.alpha.as_f64(),
            beta: self.beta.as_f64(),
        }
    }
}

impl<T: Scalar> fmt::Display for ReducedState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            self.alpha.to_literal(),
            self.beta.to_literal()
        )
    }
}

/// Four nonnegative coordinates on R^4, for the unnormalized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct RawState4<T>(pub(crate) [T; 4]);

impl<T: Scalar> RawState4<T> {
    pub fn new(coords: [T; 4]) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite_value() {
                return Err(Error::NonFinite { index });
            }
            if c.is_negative() {
                return Err(Error::NegativeComponent {
                    index,
                    value: c.to_literal(),
                });
            }
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[T; 4] {
        &self.0
    }

    pub fn scaled(&self, factor: &T) -> Result<Self> {
        Self::new(self.0.clone().map(|c| c * factor.clone()))
    }

    pub fn max_coord(&self) -> T {
        self.0.iter().cloned().fold(T::zero(), T::max_of)
    }
}
