use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid resolution {0}: grid functions need an even number of samples >= 8")]
    InvalidResolution(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {x} lies outside the interpolation domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("fixed-point iteration is not contracting (windowed increment ratio {ratio:.4} after {iterations} iterations)")]
    NonContraction { iterations: usize, ratio: f64 },

    #[error("fixed-point iteration did not reach tolerance within {max_iter} iterations (residual {residual:e})")]
    MaxIterExceeded { max_iter: usize, residual: f64 },

    #[error("Id - Q is numerically singular (smallest singular value {min_singular_value:e})")]
    SingularSystem { min_singular_value: f64 },

    #[error("missing Taylor coefficient {0}")]
    MissingCoefficient(&'static str),

    #[error("Newton iteration for inverse branch {branch} at x = {x} failed to converge (residual {residual:e})")]
    BranchNewtonFailure {
        x: f64,
        branch: usize,
        residual: f64,
    },

    #[error("no spectral gap: subdominant ratio estimate {sigma:.6}")]
    NoSpectralGap { sigma: f64 },

    #[error("leading eigenfunction changes sign")]
    NonPositiveEigenfunction,

    #[error("power iteration did not converge within {iterations} iterations")]
    PowerIterationStalled { iterations: usize },

    #[error("normalization pairing vanishes (|<l, L phi>| = {value:e})")]
    NormalizationVanishes { value: f64 },

    #[error("map is not expanding at u = {u:?}, x = {x}: |dT/dx| = {derivative}")]
    NotExpanding {
        u: Vec<f64>,
        x: f64,
        derivative: f64,
    },

    #[error("infeasible configuration: {0}")]
    ConfigInfeasible(String),

    #[error("degenerate exponent fit: {0}")]
    DegenerateFit(String),

    #[error("composition argument {value} leaves the interval [-1, 1]")]
    RangeViolation { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Error {
    /// Numerical failures (as opposed to bad input) that a driver may want to
    /// report separately.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            Error::NonContraction { .. }
                | Error::MaxIterExceeded { .. }
                | Error::SingularSystem { .. }
                | Error::BranchNewtonFailure { .. }
                | Error::NoSpectralGap { .. }
                | Error::NonPositiveEigenfunction
                | Error::PowerIterationStalled { .. }
                | Error::NormalizationVanishes { .. }
                | Error::NotExpanding { .. }
                | Error::RangeViolation { .. }
        )
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
