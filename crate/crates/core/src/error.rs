use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("cannot parse group spec `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} needs {needed} but the cap is {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },

    #[error("unsupported group: {0}")]
    Unsupported(String),

    #[error("element ({0}) does not generate a subgroup of order p (order is {1})")]
    NotOrderP(String, u64),

    #[error("hypothesis Pr(eta >= {alpha}) >= {beta} fails: Pr(eta >= {alpha}) = {actual}")]
    HypothesisFailed { alpha: u64, beta: f64, actual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn check_cap(what: &'static str, needed: u128, cap: u128) -> Result<()> {
        if needed > cap {
            Err(Error::CapExceeded { what, needed, cap })
        } else {
            Ok(())
        }
    }
}
