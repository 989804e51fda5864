use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible grids")]
    GridMismatch,

    #[error("syntax error at offset {offset}: {msg}")]
    Parse { msg: String, offset: usize },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("deformation not positive")]
    NotPositive,

    #[error("quadrature did not converge (achieved {achieved:e}, wanted {wanted:e})")]
    QuadratureFailure { achieved: f64, wanted: f64 },

    #[error("g not nonnegative")]
    GNegative,

    #[error("eigenstate not normalizable for this f")]
    NotNormalizable,

    #[error("grid too narrow for squeezing a = {0}")]
    GridTooNarrowSqueezed(f64),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("non-symmetric operator or numerical breakdown")]
    NonSymmetric,

    #[error("state outside physical domain heuristic")]
    OutsideDomain,

    #[error("increase N or reduce squeezing (projection tail mass {0:e})")]
    ProjectionTail(f64),

    #[error("eigen-iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("deformation not positive on spectrum")]
    NotPositiveOnSpectrum,

    #[error("empty position grid")]
    EmptyXGrid,

    #[error("asymmetric kernel (bug or grid too coarse): imaginary residual {0:e}")]
    AsymmetricKernel(f64),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
