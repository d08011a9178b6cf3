use core::fmt;

/// Errors raised by the spectral routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The edge ODE produced a non-finite state at this energy.
    IntegrationFailure { lambda: f64 },
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A potential could not be built or parsed.
    InvalidPotential(&'static str),
    /// A flux could not be built or parsed.
    InvalidFlux(&'static str),
    /// Two independent computations disagreed beyond tolerance.
    Consistency { what: &'static str, deviation: f64 },
    /// The flux denominator exceeds the dense eigensolver cap.
    DenominatorTooLarge { q: u64, cap: u64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IntegrationFailure { lambda } => {
                write!(f, "edge ODE integration failed at lambda = {lambda}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidPotential(msg) => write!(f, "invalid potential: {msg}"),
            Error::InvalidFlux(msg) => write!(f, "invalid flux: {msg}"),
            Error::Consistency { what, deviation } => {
                write!(f, "internal consistency check failed ({what}): deviation {deviation:e}")
            }
            Error::DenominatorTooLarge { q, cap } => {
                write!(f, "flux denominator {q} exceeds the cap of {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}
