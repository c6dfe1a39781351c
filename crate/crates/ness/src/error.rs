use thiserror::Error;

/// Errors produced by validation, solvers and experiment runners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:.6e} below -{tolerance:.3e})")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e} from U^H U = 1)")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("damping matrix is singular or nearly so (lambda_min = {lambda_min:.6e}); the fixed-point integral may diverge")]
    SingularGenerator { lambda_min: f64 },

    #[error("fixed-point residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SolverResidual { residual: f64, tolerance: f64 },

    #[error("bosonic system is unstable: lambda_min(D - A) = {lambda_min:.6e} <= 0, particle number diverges")]
    Unstable { lambda_min: f64 },

    #[error("bosonic system is marginally stable (lambda_min(D - A) = {lambda_min:.6e}); refusing to solve")]
    NumericallyMarginal { lambda_min: f64 },

    #[error("degenerate channels: both pump and loss traces vanish")]
    DegenerateChannels,

    #[error("degenerate spectrum: energies {first:.6} and {second:.6} collide within tolerance {tolerance:.3e}")]
    DegenerateSpectrum { first: f64, second: f64, tolerance: f64 },

    #[error("operation requires a {expected} system, got a {found} one")]
    StatisticsMismatch { expected: &'static str, found: &'static str },

    #[error("computed covariance violates its spectral range: eigenvalues in [{eig_min:.6e}, {eig_max:.6e}]")]
    CovarianceOutOfRange { eig_min: f64, eig_max: f64 },

    #[error("symbol at momentum x = {x:.6} is not positive semi-definite (eigenvalue {eigenvalue:.6e})")]
    SymbolNotPsd { x: f64, eigenvalue: f64 },

    #[error("{0} did not converge")]
    ConvergenceFailed(&'static str),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid matrix '{name}': {source}")]
    Matrix {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attach the name of the offending matrix to a validation error.
    pub fn for_matrix(self, name: impl Into<String>) -> Self {
        Error::Matrix { name: name.into(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
