use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// A NaN (or a forbidden infinity) appeared in input or evaluation.
    NonFinite {
        what: &'static str,
    },
    InvalidArgument(String),
    /// Root bracketing for the Luxemburg norm gave up.
    Bracket {
        lo: f64,
        hi: f64,
        log_modular_lo: f64,
        log_modular_hi: f64,
    },
    /// A structural hypothesis required by the operation does not hold.
    Hypothesis {
        name: &'static str,
        detail: String,
    },
    GridMismatch,
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Bracket {
                lo,
                hi,
                log_modular_lo,
                log_modular_hi,
            } => write!(
                f,
                "failed to bracket the Luxemburg norm: ln rho(g/{lo}) = {log_modular_lo}, \
                 ln rho(g/{hi}) = {log_modular_hi}"
            ),
            Error::Hypothesis { name, detail } => write!(f, "hypothesis {name} failed: {detail}"),
            Error::GridMismatch => f.write_str("grid mismatch"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
