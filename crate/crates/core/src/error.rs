use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix or vector dimensions do not agree.
    Dimension {
        /// What was being checked.
        context: &'static str,
    },
    /// A value that must be finite is NaN or infinite.
    NonFinite {
        /// Where the value came from.
        context: &'static str,
    },
    /// A matrix that must be symmetric is not (within tolerance).
    NotSymmetric {
        /// Largest observed `|a_ij - a_ji|`.
        asymmetry: f64,
    },
    /// A Cholesky pivot fell below `-tol_pivot`.
    NotPsd {
        /// Index of the offending pivot.
        pivot: usize,
        /// Value of the pivot.
        value: f64,
    },
    /// A covariance violates its trace budget.
    PowerExceeded {
        /// Which user (1 or 2).
        user: usize,
        /// `trace(K)`.
        trace: f64,
        /// The budget `P`.
        power: f64,
    },
    /// An argument is out of its domain (non-positive power, zero coefficient vector, ...).
    InvalidArgument(&'static str),
    /// The coefficient vectors are linearly dependent.
    LinearlyDependent,
    /// A rate expression hit a non-positive determinant or scaling.
    Degenerate(&'static str),
    /// A matrix that must be invertible is numerically singular.
    Singular(&'static str),
    /// Polynomial interpolation residual exceeded its tolerance.
    IllConditioned {
        /// Relative residual observed at the check node.
        residual: f64,
    },
    /// A condition was requested on an instance outside its domain.
    NotCollinear,
    /// A non-collinear condition was requested on collinear vectors.
    Collinear,
    /// A root that should exist was not found.
    NoRoot(&'static str),
    /// A Sturm remainder became non-finite.
    ChainDegenerate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { context } => write!(f, "dimension mismatch: {context}"),
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::NotSymmetric { asymmetry } => {
                write!(f, "matrix is not symmetric (max asymmetry {asymmetry:e})")
            }
            Error::NotPsd { pivot, value } => {
                write!(f, "matrix is not positive semi-definite (pivot {pivot} = {value:e})")
            }
            Error::PowerExceeded { user, trace, power } => {
                write!(f, "covariance of user {user} has trace {trace} above power {power}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::LinearlyDependent => write!(f, "coefficient vectors a and b are linearly dependent"),
            Error::Degenerate(msg) => write!(f, "degenerate rate expression: {msg}"),
            Error::Singular(msg) => write!(f, "singular matrix: {msg}"),
            Error::IllConditioned { residual } => {
                write!(f, "polynomial interpolation is ill-conditioned (residual {residual:e})")
            }
            Error::NotCollinear => write!(f, "channel vectors are not collinear"),
            Error::Collinear => write!(f, "channel vectors are collinear"),
            Error::NoRoot(msg) => write!(f, "no root found: {msg}"),
            Error::ChainDegenerate => write!(f, "Sturm chain degenerated"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
