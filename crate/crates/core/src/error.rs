use std::fmt;

use thiserror::Error;

/// Which half of the population a degeneracy refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sex {
    Female,
    Male,
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sex::Female => f.write_str("female"),
            Sex::Male => f.write_str("male"),
        }
    }
}

/// Errors raised by state validation, the operators and the analysis routines.
///
/// Every message starts with the name of the violated invariant so that the
/// command line front end can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NegativeComponent: coordinate {index} is negative ({value})")]
    NegativeComponent { index: usize, value: String },

    #[error("NonFinite: coordinate {index} is not a finite number")]
    NonFinite { index: usize },

    #[error("SumOutOfTolerance: coordinates sum to {sum}, expected 1")]
    SumOutOfTolerance { sum: String },

    #[error(
        "DegenerateSex: the {0} frequencies sum to zero (state lies in the excluded boundary set)"
    )]
    DegenerateSex(Sex),

    #[error("DomainViolation: {0}")]
    DomainViolation(String),

    #[error("ZeroDenominator: x or u is zero; apply the operator twice before reducing")]
    ZeroDenominator,

    #[error("ExactIterationCapExceeded: exact iteration stopped after {steps} steps ({bits} bits in the largest component)")]
    ExactIterationCapExceeded { steps: usize, bits: u64 },

    #[error("Overflow: coordinate {index} exceeds the float overflow guard ({value})")]
    Overflow { index: usize, value: String },

    #[error("WrongMode: operator is {actual}, this operation needs {expected}")]
    WrongMode {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("InvalidTable: {0}")]
    InvalidTable(String),

    #[error("NoConvergence: {0}")]
    NoConvergence(String),

    #[error("RootFindingStalled: Durand-Kerner did not converge within {sweeps} sweeps")]
    RootFindingStalled { sweeps: usize },

    #[error("InsufficientData: need at least {needed} usable points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
