use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: ‖A − A†‖ = {residual:e} exceeds tolerance {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("{method} did not converge within {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },

    #[error("eigenvector matrix is ill-conditioned (condition estimate {condition:e}); matrix may be defective")]
    IllConditioned { condition: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("‖tA‖ = {norm:e} exceeds the exponential overflow cap {cap:e}")]
    Overflow { norm: f64, cap: f64 },

    #[error("function is undefined at eigenvalue {at}")]
    DomainError { at: f64 },

    #[error("matrix is not positive definite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigenvalue spacing {spacing:e} lies within (tol, 10·tol) for cluster tolerance {tol:e}")]
    AmbiguousClustering { spacing: f64, tol: f64 },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("observable is not a polynomial in the Hamiltonian: residual {residual:e} exceeds {tol:e}")]
    NotRobust { residual: f64, tol: f64 },

    #[error("perturbed eigenvectors cannot be matched to unperturbed clusters (overlap {overlap:.3}); epsilon too large for the gap")]
    LevelCrossing { overlap: f64 },

    #[error("overlap operator between perturbed and unperturbed spectral subspaces is singular")]
    SingularOverlap,

    #[error("bound formula outside its domain: 4ε/η = {ratio} must be < 1")]
    InvalidBound { ratio: f64 },

    #[error("state vector has norm {norm}, expected 1")]
    UnnormalizedState { norm: f64 },

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {site} appears more than once")]
    DuplicateSite { site: usize },

    #[error("density matrix is not strictly positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("not a density matrix: {reason}")]
    NotState { reason: String },

    #[error("evolved state lost strict positivity at t = {t} (minimum eigenvalue {min_eigenvalue:e})")]
    PositivityLost { t: f64, min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
