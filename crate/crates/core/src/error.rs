use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure categories. The command-line front end maps each category onto
/// its own exit code, so new variants should land in an existing category
/// where possible.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A wavelength or frequency outside the range a model supports.
    #[error("{what} = {value} outside the validity window [{min}, {max}] {unit}")]
    Domain {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
        unit: &'static str,
    },

    /// A formula was requested outside the pulse regime it is derived for,
    /// or the regime itself is undefined (no walk-off).
    #[error("regime error: {0}")]
    Regime(String),

    /// Caller-supplied argument violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested grid does not fit the point budget.
    #[error("grid sizing: {reason}; {suggestion}")]
    Sizing { reason: String, suggestion: String },

    /// Width measurement failed.
    #[error("width: {0}")]
    Width(WidthError),

    /// A numerical routine did not converge or produced garbage.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterative solver hit its iteration bound; `best` is the best point
    /// reached.
    #[error("not converged: {what} after {iterations} iterations (best point {best:?})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        best: Vec<f64>,
    },

    /// Malformed external data (CSV, dispersion model files).
    #[error("ingestion: {0}")]
    Ingestion(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WidthError {
    /// The profile never drops below half maximum on one side: the axis is
    /// too short for the feature.
    IncompleteSupport { side: Side },
    /// Several disjoint regions reach the global maximum.
    Ambiguous { crossings: Vec<f64> },
    /// Empty, non-finite or all-zero profile.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for WidthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WidthError::IncompleteSupport { side } => write!(
                f,
                "no half-maximum crossing on the {} side (axis span too small)",
                match side {
                    Side::Left => "left",
                    Side::Right => "right",
                }
            ),
            WidthError::Ambiguous { crossings } => {
                write!(f, "several main peaks; half-maximum crossings at {crossings:?}")
            }
            WidthError::Degenerate => write!(f, "profile has no positive finite maximum"),
        }
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
