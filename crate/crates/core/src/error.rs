use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a function, e.g. `Y0(0)`.
    Domain { what: &'static str, value: f64 },
    /// Wavenumber inside the guard band around a cavity mode threshold.
    Threshold { kd_over_pi: f64, nearest: u64 },
    /// Quadrature or series did not reach the requested tolerance.
    Convergence { what: &'static str, estimate: f64, error: f64 },
    /// A denominator that the formulas require to be nonzero vanished.
    Degenerate { what: &'static str },
    /// The analytic and finite-difference k-derivatives disagree.
    DerivativeMismatch { analytic: f64, numeric: f64, rel: f64 },
    /// Invalid user input (geometry, tolerances, atom specification).
    InvalidInput(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} outside domain"),
            Error::Threshold { kd_over_pi, nearest } => write!(
                f,
                "kd/pi = {kd_over_pi} lies inside the guard band of mode threshold n = {nearest}"
            ),
            Error::Convergence { what, estimate, error } => write!(
                f,
                "{what} did not converge (estimate {estimate}, error {error})"
            ),
            Error::Degenerate { what } => write!(f, "degenerate configuration: {what}"),
            Error::DerivativeMismatch { analytic, numeric, rel } => write!(
                f,
                "analytic derivative {analytic} and finite difference {numeric} differ by {rel:e} (relative)"
            ),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
