use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weights have zero total mass")]
    ZeroMass,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("importance weight undefined: played action {0} has zero probability")]
    DivisionDomain(usize),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("enumeration budget exceeded: {needed} evaluations > limit {limit}")]
    Budget { needed: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
