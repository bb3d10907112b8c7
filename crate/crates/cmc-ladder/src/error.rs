//! Error type shared by every module.

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A derivation needed a jet generator above the configured cap.
    TruncationExceeded { needed: u32, cap: u32 },
    /// The linear antiderivative problem has no solution in the ansatz.
    Obstructed,
    /// Input violates an operation's precondition.
    Precondition(String),
    /// A constructed object failed one of its defining invariants.
    InvariantViolation(String),
    /// A series computation needs more terms than the model carries.
    TruncationInsufficient { needed: i64, available: i64 },
    /// A residue integral depends on the radius.
    EpsilonDependent(String),
    ConstantsNotAdapted(String),
    DegenerateState(String),
    NotCompatible(String),
    StepFailure(String),
    /// The requested finite-type level carries no Killing field.
    DegenerateLevel(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TruncationExceeded { needed, cap } => {
                write!(f, "truncation exceeded: generator index {} above cap {}", needed, cap)
            }
            Error::Obstructed => write!(f, "obstructed: no antiderivative in the ansatz"),
            Error::Precondition(s) => write!(f, "precondition violated: {}", s),
            Error::InvariantViolation(s) => write!(f, "invariant violated: {}", s),
            Error::TruncationInsufficient { needed, available } => {
                write!(f, "series truncation insufficient: need order {}, have {}", needed, available)
            }
            Error::EpsilonDependent(s) => write!(f, "residue depends on the radius: {}", s),
            Error::ConstantsNotAdapted(s) => write!(f, "constants not adapted: {}", s),
            Error::DegenerateState(s) => write!(f, "degenerate state: {}", s),
            Error::NotCompatible(s) => write!(f, "structure equations not compatible: {}", s),
            Error::StepFailure(s) => write!(f, "integration step failed: {}", s),
            Error::DegenerateLevel(s) => write!(f, "degenerate level: {}", s),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
