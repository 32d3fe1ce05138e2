//! Classical simulator of quantum gradient descent over block-encoded
//! diagonal operators.
//!
//! The simulator tracks the *logical* encoded block of each notional
//! block-encoding unitary together with its subnormalization, error bound
//! and a query-cost ledger, instead of materializing dilated unitaries.
//! Three gradient-descent engines act on diagonal embeddings of the
//! iterate, and seven application drivers reduce standard problems
//! (linear systems, fitting, SVM, clustering, neural networks, Ising
//! energies, PCA) to the supported objective families. Every quantum-path
//! number is cross-checked against an independent classical oracle.

pub mod apps;
pub mod block_encoding;
pub mod encoded_scalars;
pub mod numerics;
pub mod oracle;
pub mod qgd;
pub mod state_prep;

use thiserror::Error as ThisError;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual operations.
#[derive(Debug, Clone, ThisError)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not positive semidefinite: eigenvalue {0} below tolerance")]
    NotPsd(f64),
    #[error("subnormalization {alpha} smaller than operator norm {norm}")]
    SubnormalizationTooSmall { alpha: f64, norm: f64 },
    #[error("matrix is not unitary: deviation {0}")]
    NotUnitary(f64),
    #[error("scale factor {0} must exceed 1")]
    InvalidScale(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("amplification out of range: gamma*norm = {scaled} exceeds 1 - delta = {limit}")]
    AmplificationOutOfRange { scaled: f64, limit: f64 },
    #[error("polynomial exceeds bound on spectral interval: |P({at})| = {value}")]
    PolynomialOutOfBounds { at: f64, value: f64 },
    #[error("unsupported block: {0}")]
    UnsupportedBlock(String),
    #[error("state is not normalized: norm {0}")]
    NotNormalized(f64),
    #[error("all-zero vector")]
    ZeroVector,
    #[error("negative coefficient at index {0}; route signed rows to the v1 construction")]
    NegativeCoefficient(usize),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("diagonal entry {0} outside spectral range [1/kappa, 1]")]
    OutOfSpectralRange(f64),
    #[error("objective family mismatch: expected {expected}, got {got}")]
    WrongFamily { expected: &'static str, got: &'static str },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("norm budget exceeded: iterate norm {norm} at step {step}")]
    NormBudgetExceeded { norm: f64, step: usize },
    #[error("empty cluster")]
    EmptyCluster,
    #[error("expansion too large: {terms} terms exceed cap {cap}")]
    ExpansionTooLarge { terms: usize, cap: usize },
    #[error("too many sites: 2^{sites} exceeds cap {cap}")]
    TooManySites { sites: usize, cap: usize },
    #[error("indeterminate classification: |score| = {0} below margin tolerance")]
    Indeterminate(f64),
    #[error("gradient bound needs explicit value for n = {0}")]
    NeedExplicitBound(usize),
    #[error("descent failed at iteration {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}
