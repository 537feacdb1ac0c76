use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A dimension parameter is outside of its allowed range.
    InvalidDimension { what: &'static str, value: usize, reason: &'static str },
    /// Matrix or vector sizes do not agree.
    Shape { expected: usize, found: usize, what: &'static str },
    /// An index argument is outside `0..bound`.
    IndexOutOfRange { index: usize, bound: usize },
    /// Gram-Schmidt hit a pivot below the rank threshold.
    DegenerateFrame { pivot: usize, norm: f64 },
    /// The two plane vectors span less than a 2-plane.
    DegeneratePlane { area2: f64 },
    /// A vector argument violates its precondition (unit length, tangency, ...).
    InvalidVector(String),
    /// A real parameter is out of range.
    InvalidParameter { name: &'static str, value: f64 },
    /// An operation was called outside of its stated hypothesis.
    Precondition(String),
    /// The point datum failed validation.
    InvalidPoint(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidDimension { what, value, reason } => {
                write!(f, "invalid dimension {what}={value}: {reason}")
            }
            Self::Shape { expected, found, what } => {
                write!(f, "shape mismatch for {what}: expected {expected}, found {found}")
            }
            Self::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range 0..{bound}")
            }
            Self::DegenerateFrame { pivot, norm } => {
                write!(f, "degenerate frame: vector {pivot} has residual norm {norm:e}")
            }
            Self::DegeneratePlane { area2 } => {
                write!(f, "degenerate plane: squared area {area2:e}")
            }
            Self::InvalidVector(msg) => write!(f, "invalid vector: {msg}"),
            Self::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name}={value}")
            }
            Self::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Self::InvalidPoint(msg) => write!(f, "invalid point: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
