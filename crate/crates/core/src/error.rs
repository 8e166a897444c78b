use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site {site} is outside the register of {n_sites} sites")]
    SiteOutOfGraph { site: usize, n_sites: usize },

    #[error("site index {0} exceeds the 64-site bitstring capacity")]
    SiteIndexTooLarge(usize),

    #[error("dense representation on {n_sites} sites exceeds the cap of {cap} sites")]
    DimensionCapExceeded { n_sites: usize, cap: usize },

    #[error("site set is not connected: sites {0} and {1} are in different components")]
    DisconnectedSupport(usize, usize),

    #[error("invalid particle number {p} for {n_sites} sites")]
    InvalidParticleNumber { p: usize, n_sites: usize },

    #[error("tower terminates: (Q†)^{requested}|0⟩ vanishes, largest valid power is {max_p}")]
    TowerTruncated { requested: usize, max_p: usize },

    #[error("subset of {size} sites exceeds the reduced-density cap of {cap}")]
    SubsetTooLarge { size: usize, cap: usize },

    #[error("operator is not a parent of |W⟩: {0}")]
    NotParentOfW(String),

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("packing found only {achieved} separated sites, {requested} requested")]
    PackingInsufficient { requested: usize, achieved: usize },

    #[error("tower class condition violated: {0}")]
    ClassConditionViolated(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("light cone of {size} sites exceeds the cap of {cap}")]
    ConeTooLarge { size: usize, cap: usize },

    #[error("energy {index} has imaginary part {imag:e}")]
    NonRealEnergies { index: usize, imag: f64 },

    #[error("operator is {actual}-local, expected at most {expected}-local")]
    NotKLocal { expected: usize, actual: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
