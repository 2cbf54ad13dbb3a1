//! Error type shared by all modules.

use core::fmt;

/// Errors raised by selection, calibration, and model operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two inputs that must agree in length or dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// An index does not address a valid pool position.
    IndexOutOfRange { index: usize, len: usize },
    /// A batch index is not currently unlabeled.
    NotUnlabeled(usize),
    /// A batch contains the same index twice.
    DuplicateIndex(usize),
    /// An input that must be nonempty is empty.
    EmptyInput(&'static str),
    /// A scalar parameter is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A selection budget exceeds the available unlabeled points.
    BudgetExceedsUnlabeled { budget: usize, available: usize },
    /// Exhaustive subset enumeration would exceed the configured guard.
    SubsetGuardExceeded { combinations: u128, limit: u128 },
    /// A label id is not in `[0, num_classes)`.
    LabelOutOfRange { label: usize, num_classes: usize },
    /// A parameter combination violates an assumption of the error bound.
    AssumptionViolated(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::NotUnlabeled(i) => write!(f, "index {i} is not in the unlabeled set"),
            Error::DuplicateIndex(i) => write!(f, "index {i} appears more than once in the batch"),
            Error::EmptyInput(what) => write!(f, "{what} must be nonempty"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::BudgetExceedsUnlabeled { budget, available } => {
                write!(f, "budget {budget} exceeds {available} unlabeled points")
            }
            Error::SubsetGuardExceeded {
                combinations,
                limit,
            } => write!(
                f,
                "subset enumeration of {combinations} candidates exceeds guard {limit}"
            ),
            Error::LabelOutOfRange { label, num_classes } => {
                write!(f, "label {label} out of range for {num_classes} classes")
            }
            Error::AssumptionViolated(what) => write!(f, "assumption violated: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
