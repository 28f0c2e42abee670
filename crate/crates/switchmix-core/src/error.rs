//! Crate-wide error type.

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input value fell outside the domain expected by a loss family.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    DomainViolation {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A mixture was requested over an empty estimate list.
    #[error("cannot mix an empty estimate list")]
    EmptyEstimates,

    /// A weighted estimate list failed structural validation.
    #[error("invalid weighted estimates: {0}")]
    InvalidWeights(String),

    /// The exhaustive scheme was asked for a horizon beyond its cap.
    #[error("horizon {given} exceeds the exhaustive-scheme cap {cap}")]
    HorizonTooLarge { given: usize, cap: usize },

    /// A known-horizon run was stepped past its final round.
    #[error("run complete: horizon {0} already reached")]
    RunComplete(usize),

    /// An expert path contains a zero-weight transition.
    #[error("infeasible path: zero transition weight into step {t}")]
    InfeasiblePath { t: usize },

    /// Catch-all for malformed arguments (empty data, bad segment specs, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
