use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyInput,
    DimensionMismatch { expected: usize, found: usize },
    /// `m` is not `m1^d` for an integer `m1`.
    NotAPerfectPower { m: usize, d: usize },
    InvalidParameter(&'static str),
    NonPositiveCoefficient { value: f64 },
    /// A fused symbol `d_{k,j}` sits on the closed negative real axis, so no
    /// principal square root exists. Indices are 0-based.
    SingularSymbol { k: usize, j: usize, re: f64, im: f64 },
    /// The realized `P^{-1} y` carried an imaginary part above threshold.
    ImaginaryLeak { max_imag: f64, threshold: f64 },
    MissingExactSolution,
    Breakdown { iteration: usize, residual: f64 },
    IndefinitePreconditioner { iteration: usize, value: f64 },
    SizeGuard { size: usize, limit: usize },
    /// A dense matrix has an eigenvalue on the branch cut `(-inf, 0]`.
    BranchCut { re: f64, im: f64 },
    NotConverged(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotAPerfectPower { m, d } => {
                write!(f, "{m} is not a perfect {d}-th power")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NonPositiveCoefficient { value } => {
                write!(f, "coefficient sample {value} is not strictly positive")
            }
            Error::SingularSymbol { k, j, re, im } => write!(
                f,
                "singular symbol at (k={k}, j={j}): d = {re:e} + {im:e}i lies on (-inf, 0]"
            ),
            Error::ImaginaryLeak { max_imag, threshold } => write!(
                f,
                "imaginary leak {max_imag:e} exceeds threshold {threshold:e}"
            ),
            Error::MissingExactSolution => write!(f, "problem has no exact solution"),
            Error::Breakdown { iteration, residual } => write!(
                f,
                "Lanczos breakdown at iteration {iteration} with residual {residual:e}"
            ),
            Error::IndefinitePreconditioner { iteration, value } => write!(
                f,
                "preconditioner not positive definite at iteration {iteration}: <M^-1 v, v> = {value:e}"
            ),
            Error::SizeGuard { size, limit } => {
                write!(f, "dense size {size} exceeds guard {limit}")
            }
            Error::BranchCut { re, im } => write!(
                f,
                "eigenvalue {re:e} + {im:e}i lies on the branch cut (-inf, 0]"
            ),
            Error::NotConverged(what) => write!(f, "{what} did not converge"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
