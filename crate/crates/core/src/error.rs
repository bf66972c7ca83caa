use thiserror::Error;

/// Errors surfaced by the geometry, kernel, integration and sampling layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A user-supplied object (kernel table, configuration) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A spectral band selected nothing; the projection has rank zero.
    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    /// The radial window is too short for the requested tolerance.
    #[error(
        "kernel window too small: residual mass {residual:.3e} exceeds {threshold:.3e}; \
         retry with window >= {suggested}"
    )]
    WindowTooSmall {
        residual: f64,
        threshold: f64,
        suggested: usize,
    },

    /// The kernel evaluator misbehaved (non-Hermitian data, imaginary leakage).
    #[error("kernel implementation error: {0}")]
    KernelImplementation(String),

    /// Discretized operator eigenvalues escaped [0, 1] beyond tolerance.
    #[error(
        "discretization too coarse: eigenvalues in [{min_eig:.3e}, {max_eig:.6}]; \
         retry with at least {suggested_radial} radial x {suggested_angular} angular nodes"
    )]
    DiscretizationTooCoarse {
        min_eig: f64,
        max_eig: f64,
        suggested_radial: usize,
        suggested_angular: usize,
    },

    /// A radial tail could not be certified below the requested tolerance.
    #[error("nonintegrable tail: {0}")]
    NonintegrableTail(String),
}

pub type Result<T> = std::result::Result<T, Error>;
