//! Crate-wide error type.

use std::fmt;

use crate::job::JobId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Job sizes must be strictly positive.
    NonPositiveSize(String),
    /// The accuracy parameter must be a unit fraction 1/q with q >= 2.
    BadEpsilon(String),
    /// A job id was admitted twice.
    DuplicateJob(JobId),
    /// A job id is not part of the instance or schedule at hand.
    UnknownJob(JobId),
    /// Machine index out of range.
    MachineOutOfRange { machine: usize, machines: usize },
    /// Two vectors that must have equal length do not.
    LengthMismatch { left: usize, right: usize },
    /// Index into a profile or vector out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// A precondition on an argument failed.
    BadParameter(String),
    /// An enumeration exceeded its node budget or a value overflowed a guard.
    BudgetExceeded(String),
    /// A structural invariant that the algorithms promise was violated.
    IntegrityCheck(String),
    /// A string could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveSize(s) => write!(f, "job size must be positive: {}", s),
            Error::BadEpsilon(s) => write!(f, "epsilon must be a unit fraction 1/q, q >= 2: {}", s),
            Error::DuplicateJob(id) => write!(f, "duplicate job id {}", id),
            Error::UnknownJob(id) => write!(f, "unknown job id {}", id),
            Error::MachineOutOfRange { machine, machines } => {
                write!(f, "machine {} out of range (have {})", machine, machines)
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {} vs {}", left, right)
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {} out of range (len {})", index, len)
            }
            Error::BadParameter(s) => write!(f, "bad parameter: {}", s),
            Error::BudgetExceeded(s) => write!(f, "budget exceeded: {}", s),
            Error::IntegrityCheck(s) => write!(f, "integrity check failed: {}", s),
            Error::Parse(s) => write!(f, "parse error: {}", s),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
