use core::fmt;

/// Errors raised by the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    NonNegativeD(i64),
    NotSquarefree(i64),
    UnknownClassNumber(i64),
    MixedField { left: i64, right: i64 },
    ZeroModulus,
    NotPrime(u64),
    ZeroOrUnit,
    /// A norm or coordinate left the range the routine supports.
    NormTooLarge,
    NotSquarefreeIdeal,
    InvalidParameter(&'static str),
    Budget { what: &'static str, limit: u64, requested: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonNegativeD(d) => write!(f, "d = {d} must be negative"),
            Error::NotSquarefree(d) => write!(f, "d = {d} is not squarefree"),
            Error::UnknownClassNumber(d) => {
                write!(f, "no built-in class number for d = {d}; supply one explicitly")
            }
            Error::MixedField { left, right } => {
                write!(f, "operands live in different fields (d = {left} and d = {right})")
            }
            Error::ZeroModulus => write!(f, "modulus must be a nonzero ideal"),
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::ZeroOrUnit => write!(f, "element must be nonzero and not a unit"),
            Error::NormTooLarge => write!(f, "norm exceeds the supported range"),
            Error::NotSquarefreeIdeal => write!(f, "ideal is not squarefree"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Budget { what, limit, requested } => {
                write!(f, "{what}: requested {requested} exceeds budget {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}
