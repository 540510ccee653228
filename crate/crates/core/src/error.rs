use thiserror::Error;

/// Errors raised by the bound engine and its oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: negative mass, out-of-range parameter, empty vector.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `nu` puts mass where the reference measure has none.
    #[error("absolute continuity fails at k = {k}: nu has mass where mu has none")]
    AbsoluteContinuity { k: i64 },

    /// A log-concavity (or other) hypothesis needed by a bound does not hold.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// The bound is well defined but its preconditions exclude this instance.
    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    /// The anchor index does not satisfy `q_l * q_{l+1} > 0`.
    #[error("invalid anchor l = {ell}: {reason}")]
    InvalidAnchor { ell: i64, reason: String },

    /// A matroid axiom fails for the given pair of sets (bitmasks).
    #[error("{axiom} property violated by sets {first:#b} and {second:#b}")]
    AxiomViolation {
        axiom: &'static str,
        first: u32,
        second: u32,
    },

    /// Iterative numerics did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures meaning "the theorem does not apply here" as opposed
    /// to malformed input.
    pub fn is_not_applicable(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis(_)
                | Error::NotApplicable(_)
                | Error::AbsoluteContinuity { .. }
                | Error::InvalidAnchor { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
