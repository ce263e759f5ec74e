use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, LandauError>;

#[derive(Debug, Error)]
pub enum LandauError {
    #[error("domain error: {0}")]
    Domain(String),

    /// A field does not decay at the grid boundary, so stencils near the
    /// edge would read meaningful data.
    #[error(
        "boundary contamination at grid point ({i}, {j}) = ({x}, {y}): \
         |f| = {ratio:.3e} x max|f| exceeds {limit:.1e}"
    )]
    Contamination {
        i: usize,
        j: usize,
        x: f64,
        y: f64,
        ratio: f64,
        limit: f64,
    },

    #[error("non-finite sample at grid point ({i}, {j})")]
    Evaluation { i: usize, j: usize },

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (worst residual {worst_residual:.3e}, tolerance {tolerance:.1e})"
    )]
    Solver {
        iterations: usize,
        tolerance: f64,
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("regulator extrapolation diverged: raw sequence {sequence:?}")]
    Divergence { sequence: Vec<(f64, Complex64)> },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LandauError::Domain(msg.into()))
}
