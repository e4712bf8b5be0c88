//! Arithmetic abstraction shared by every module.
//!
//! All operators and checks are written once against [`Scalar`] and
//! instantiated either with exact arbitrary-precision rationals
//! ([`RBig`]) or with binary64 floats. The mode is a property of the
//! type, so a single trajectory can never mix the two.

use std::fmt;
use std::str::FromStr;

use dashu_base::{BitTest, Gcd, SquareRoot, UnsignedAbs};
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Run-wide arithmetic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithMode {
    Exact,
    #[serde(alias = "float")]
    F64,
}

impl fmt::Display for ArithMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithMode::Exact => f.write_str("exact"),
            ArithMode::F64 => f.write_str("f64"),
        }
    }
}

impl FromStr for ArithMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(ArithMode::Exact),
            "f64" | "float" => Ok(ArithMode::F64),
            other => Err(Error::Parse(format!(
                "unknown arithmetic mode '{other}' (expected exact or f64)"
            ))),
        }
    }
}

/// Absolute tolerance on the simplex-sum constraint in float mode.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Below this a float sub-population total counts as zero.
pub const FLOAT_THETA_FLOOR: f64 = 1e-300;

/// Float coordinates above this raise [`Error::Overflow`] in the unnormalized mode.
pub const FLOAT_OVERFLOW_GUARD: f64 = 1e300;

/// A real number the operators can compute with.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
{
    const MODE: ArithMode;

    /// `num / den`, rounded in float mode.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts a binary64 value; exact mode takes its exact binary value.
    fn from_f64_value(value: f64) -> Self;

    fn as_f64(&self) -> f64;

    fn is_finite_value(&self) -> bool;

    /// Size of the representation in bits (largest of numerator and denominator in exact mode).
    fn bit_size(&self) -> u64;

    /// Rounds to the nearest binary64 value, expressed in this type.
    fn reanchor(&self) -> Self;

    /// Square root when it is representable in this type.
    fn sqrt_exact(&self) -> Option<Self>;

    /// True when the stored representation is canonical (lowest terms, positive denominator).
    fn is_canonical(&self) -> bool;

    /// Parses `p/q`, an integer, or a decimal literal.
    fn parse_literal(text: &str) -> Result<Self>;

    /// `p/q` in exact mode, shortest round-trip decimal in float mode.
    fn to_literal(&self) -> String;

    /// Slack for an inequality check: zero in exact mode, `tol` in float mode.
    fn slack(tol: f64) -> Self {
        match Self::MODE {
            ArithMode::Exact => Self::zero(),
            ArithMode::F64 => Self::from_f64_value(tol),
        }
    }

    /// Tolerance on the simplex-sum constraint.
    fn sum_tolerance() -> Self {
        Self::slack(FLOAT_SUM_TOLERANCE)
    }

    /// A sub-population total at or below this is treated as zero.
    fn theta_floor() -> Self {
        Self::slack(FLOAT_THETA_FLOOR)
    }

    fn overflow_limit() -> Option<Self> {
        match Self::MODE {
            ArithMode::Exact => None,
            ArithMode::F64 => Some(Self::from_f64_value(FLOAT_OVERFLOW_GUARD)),
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

fn parse_rational(text: &str) -> Result<RBig> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    let int = |part: &str| {
        IBig::from_str(part.trim()).map_err(|e| Error::Parse(format!("'{text}': {e}")))
    };
    if let Some((num, den)) = text.split_once('/') {
        let (num, den) = (int(num)?, int(den)?);
        if den.is_zero() {
            return Err(Error::Parse(format!("'{text}': zero denominator")));
        }
        return Ok(RBig::from_parts_signed(num, den));
    }
    if let Ok(n) = int(text) {
        return Ok(RBig::from(n));
    }
    let value: f64 = text
        .parse()
        .map_err(|_| Error::Parse(format!("'{text}' is not a number")))?;
    RBig::try_from(value).map_err(|_| Error::Parse(format!("'{text}' is not finite")))
}

impl Scalar for f64 {
    const MODE: ArithMode = ArithMode::F64;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_value(value: f64) -> Self {
        value
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn bit_size(&self) -> u64 {
        64
    }

    fn reanchor(&self) -> Self {
        *self
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn is_canonical(&self) -> bool {
        self.is_finite()
    }

    fn parse_literal(text: &str) -> Result<Self> {
        let value = if text.contains('/') {
            parse_rational(text)?.to_f64().value()
        } else {
            text.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{}' is not a number", text.trim())))?
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Parse(format!("'{}' is not finite", text.trim())))
        }
    }

    fn to_literal(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for RBig {
    const MODE: ArithMode = ArithMode::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        RBig::from_parts_signed(num.into(), den.into())
    }

    fn from_f64_value(value: f64) -> Self {
        RBig::try_from(value).expect("finite float")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().value()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn bit_size(&self) -> u64 {
        self.numerator()
            .unsigned_abs()
            .bit_len()
            .max(self.denominator().bit_len()) as u64
    }

    fn reanchor(&self) -> Self {
        Self::from_f64_value(self.as_f64())
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let root = |n: &UBig| {
            let r = n.sqrt();
            (&r * &r == *n).then_some(r)
        };
        let num = root(&self.numerator().unsigned_abs())?;
        let den = root(self.denominator())?;
        Some(RBig::from_parts(num.into(), den))
    }

    fn is_canonical(&self) -> bool {
        self.numerator()
            .unsigned_abs()
            .gcd(self.denominator())
            .is_one()
            || (self.numerator().is_zero() && self.denominator().is_one())
    }

    fn parse_literal(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn to_literal(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let half = RBig::parse_literal("1/2").unwrap();
        assert_eq!(half, RBig::from_ratio(1, 2));
        assert_eq!(RBig::parse_literal("0.5").unwrap(), half);
        assert_eq!(RBig::parse_literal("-3").unwrap(), RBig::from_ratio(-3, 1));
        // decimals go through their binary value
        assert_eq!(
            RBig::parse_literal("0.1").unwrap(),
            RBig::try_from(0.1).unwrap()
        );
        assert_eq!(f64::parse_literal("1/3").unwrap(), 1.0 / 3.0);
        assert!(f64::parse_literal("nan").is_err());
        assert!(RBig::parse_literal("1/0").is_err());
        assert!(RBig::parse_literal("abc").is_err());
    }

    #[test]
    fn literals_round_trip() {
        let r = RBig::from_ratio(-22, 7);
        assert_eq!(RBig::parse_literal(&r.to_literal()).unwrap(), r);
        let f = 0.1 + 0.2;
        assert_eq!(f64::parse_literal(&f.to_literal()).unwrap(), f);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(
            RBig::from_ratio(9, 4).sqrt_exact(),
            Some(RBig::from_ratio(3, 2))
        );
        assert_eq!(RBig::from_ratio(2, 1).sqrt_exact(), None);
        assert_eq!(RBig::from_ratio(-1, 4).sqrt_exact(), None);
    }

    #[test]
    fn slack_is_zero_in_exact_mode() {
        assert!(RBig::slack(1e-12).is_zero());
        assert_eq!(f64::slack(1e-12), 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<ArithMode>().unwrap(), ArithMode::Exact);
        assert_eq!("f64".parse::<ArithMode>().unwrap(), ArithMode::F64);
        assert!("f32".parse::<ArithMode>().is_err());
    }
}
