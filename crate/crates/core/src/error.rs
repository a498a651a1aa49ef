use thiserror::Error;

use crate::fock::OccupationVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `|g * alpha|` exceeded the perturbative bound.
    #[error("pump regime violated: |g * alpha| = {product:.3e} exceeds {bound}")]
    PumpRegime { product: f64, bound: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("state leaves the one-photon-per-path subspace ({} offending terms, weight {discarded_weight:.3e})", offending.len())]
    UnsupportedSubspace {
        offending: Vec<OccupationVector>,
        discarded_weight: f64,
    },

    #[error("oracle Hilbert space has dimension {dim}, limit is {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("map is not completely positive: Choi eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("adder output has zero norm")]
    DegenerateOutput,

    #[error("post-selection probability vanishes at every retained order")]
    DegenerateOutcome,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("resource matching failed for p = {p}: yield mismatch {at_lower:.3e} at k = 0 and {at_upper:.3e} at k = {k_max}")]
    MatchingFailure {
        p: f64,
        k_max: f64,
        at_lower: f64,
        at_upper: f64,
    },

    #[error("bisection bracket [{lower}, {upper}] does not contain a sign change")]
    NoBracket { lower: f64, upper: f64 },
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
