use alloc::string::String;

/// Errors raised by the state engine, the optical elements and the averaging code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("subsystem `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("subsystem `{0}` is not present in the state")]
    MissingLabel(String),
    #[error("subsystem `{label}` has dimension {found}, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("amplitude vector has length {found}, labels require {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("subsystem dimension must be at least 1 (`{0}`)")]
    ZeroDimension(String),
    #[error("basis index {index} out of range for `{label}` of dimension {dim}")]
    IndexOutOfRange {
        label: String,
        index: usize,
        dim: usize,
    },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("states are defined over different subsystems")]
    LabelSetMismatch,
    #[error("operator flagged unitary deviates from unitarity by {0:e}")]
    NotUnitary(f64),
    #[error("time shift by {shift} leaves register `{label}` of dimension {dim}")]
    TimeBinOverflow {
        label: String,
        shift: isize,
        dim: usize,
    },
    #[error("herald branch index {0} outside 1..=4")]
    InvalidBranch(u8),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
