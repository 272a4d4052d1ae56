//! Gradient dynamics on coupled cell networks.
//!
//! A cell network is a connected undirected graph whose vertices carry
//! identical one-dimensional dynamical systems and whose edges carry
//! pairwise couplings. This crate constructs the admissible functions of
//! such networks (coupling sums plus per-degree self-connection terms),
//! classifies their synchronous, 2-colour and ring equilibria through
//! closed-form Laplacian spectra, and cross-checks every classification
//! against a dense eigensolver and gradient-flow integration.
//!
//! Modules:
//! - [`graph`]: cell graphs and structural queries (degrees, regularity,
//!   bipartiteness, (d,m)-graph detection)
//! - [`coupling`]: coupling / self-connection / phase-coupling functions
//!   with analytic or finite-difference derivatives
//! - [`admissible`]: assembly and validation of admissible functions
//! - [`spectra`]: Laplacians, weighted Laplacians, inertia and the
//!   closed-form Hessian spectra
//! - [`synchrony`]: synchronous and 2-colour critical point classification
//! - [`ring`]: equilibria of S^1-invariant functions on a ring of cells
//! - [`flow`]: gradient-flow integration and multistart minimization
//! - [`fixtures`]: the named graphs used throughout the test suite

pub mod admissible;
pub mod coupling;
pub mod fixtures;
pub mod flow;
pub mod graph;
pub mod ring;
pub mod spectra;
pub mod synchrony;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
