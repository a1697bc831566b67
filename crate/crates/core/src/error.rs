use thiserror::Error;

use crate::chart::{ChartId, Inclusion};

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformError {
    #[error("singular curve: discriminant 4a^3 + 27b^2 vanishes for a = {a}, b = {b}")]
    SingularCurve { a: String, b: String },

    #[error("negative exponent {exponent} for variable `{var}` in chart {chart}")]
    NegativeExponent {
        chart: ChartId,
        var: char,
        exponent: i64,
    },

    #[error("chart mismatch: expected {expected}, found {found}")]
    ChartMismatch { expected: ChartId, found: ChartId },

    #[error("{from} is not contained in {to}")]
    InvalidInclusion { from: ChartId, to: ChartId },

    #[error("cokernel of the derivation on {chart} did not stabilize before degree cap {cap}")]
    StabilizationFailure { chart: ChartId, cap: usize },

    #[error("element is not in the image of the derivation on {chart}")]
    NotInImage { chart: ChartId },

    #[error("representative is not a cocycle on {0}")]
    NotACocycle(Inclusion),

    #[error("hull certification failed at order {order}: {detail}")]
    HullCertificationFailure { order: usize, detail: String },

    #[error("unexpected defect: {0}")]
    UnexpectedDefect(String),

    #[error("malformed rational `{0}`")]
    MalformedRational(String),

    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl DeformError {
    /// Stable machine-readable code, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            DeformError::SingularCurve { .. } => "singular_curve",
            DeformError::StabilizationFailure { .. } => "stabilization_failure",
            DeformError::HullCertificationFailure { .. } => "certification_failure",
            DeformError::Io(_) => "io",
            DeformError::MalformedRational(_)
            | DeformError::ZeroDenominator(_)
            | DeformError::Parse { .. }
            | DeformError::Config(_) => "usage",
            _ => "internal",
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            DeformError::SingularCurve { .. } => 2,
            DeformError::StabilizationFailure { .. } => 3,
            DeformError::HullCertificationFailure { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, DeformError>;
