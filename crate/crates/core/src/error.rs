use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: size {size} exceeds budget {limit}")]
    BudgetExceeded { what: &'static str, size: u128, limit: u128 },

    #[error("value {value} lies outside the set domain [1, {n_max}]")]
    DomainExceeded { value: u64, n_max: u64 },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("Gowers average {0:e} is below -1e-12")]
    NegativeAverage(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl Error {
    /// Stable snake_case tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Overflow(_) => "overflow",
            Error::ModulusMismatch { .. } => "modulus_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::DomainExceeded { .. } => "domain_exceeded",
            Error::NonFinite(_) => "non_finite",
            Error::NegativeAverage(_) => "negative_average",
        }
    }
}
