use thiserror::Error;

/// Errors raised by the design pipeline and its numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})"
    )]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, max {max_eigenvalue:.3e})")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("matrix is numerically singular (min eigenvalue {min_eigenvalue:.3e}, max {max_eigenvalue:.3e})")]
    Singular {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("zero mainlobe operator: denominator matrix has numerical rank 0")]
    ZeroMainlobe,

    #[error("A + B is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefiniteSum { min_eigenvalue: f64 },

    #[error("null-space block of B is not positive definite (min eigenvalue {min_eigenvalue:.3e}); A + B must be positive definite")]
    NullBlockNotPd { min_eigenvalue: f64 },

    #[error("no mainlobe energy: c^H A_ml c = {energy:.3e}")]
    NoMainlobeEnergy { energy: f64 },

    #[error("unbounded lobe: no half-power crossing on the {side} side within the grid")]
    UnboundedLobe { side: &'static str },

    #[error("randomization failed: none of {n_candidates} candidates satisfied the mainlobe constraints; increase n_rand or coarsen the constraint grid")]
    RandomizationFailed { n_candidates: usize },

    #[error("SDP solver finished with status {status} (gap {gap:.3e}, infeasibility {infeasibility:.3e}); {detail}")]
    Sdp {
        status: String,
        gap: f64,
        infeasibility: f64,
        detail: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
