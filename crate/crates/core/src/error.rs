use thiserror::Error;

pub type Result<T, E = ForgeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ForgeError {
    /// Malformed or out-of-range input (bad weights, unknown ids, empty sets, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// An enumeration would exceed its configured cap.
    #[error("{what} requires {required} items, above the cap of {cap}")]
    Capacity {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    /// The exact (rational) backend was asked for a transcendental quantity.
    #[error("{0} has no exact rational value; use float mode")]
    Inexact(String),

    /// A cost function is not covered by the requested parameter assignment.
    #[error("cost `{cost}` is not covered by the {family} parameter assignment")]
    NotInFamily { cost: String, family: String },

    #[error("no profile is an alpha-approximate equilibrium for alpha = {0}")]
    EmptyEquilibriumSet(String),

    #[error("optimum social cost is zero; ratio undefined")]
    ZeroOptimum,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(ForgeError::Input(msg.into()))
}
