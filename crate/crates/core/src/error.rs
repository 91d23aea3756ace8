use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("site {site} out of range for {n} qubits")]
    IndexOutOfRange { site: usize, n: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{n} qubits exceeds the dense limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_site(site: usize, n: usize) -> Result<()> {
    if site < n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { site, n })
    }
}
