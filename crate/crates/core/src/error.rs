use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are grouped by how the command line treats them: malformed
/// or inconsistent input, mathematical degeneracy of the data, and internal
/// invariant violations that indicate a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("series has non-invertible constant term")]
    DivisionByNonUnit,
    #[error("substituted series must vanish at the origin")]
    CompositionNotLocal,
    #[error("series is not invertible at the origin (zero linear term)")]
    NotInvertibleAtOrigin,
    #[error("truncation order exhausted: {0}")]
    OrderExhausted(String),
    #[error("quadratic scalars over different fields: {0}")]
    FieldMismatch(String),

    #[error("foliation is singular at the origin")]
    SingularFoliation,
    #[error("foliations are not transverse at the origin: {0}")]
    NotTransverse(String),
    #[error("cross-ratio constant must differ from 0 and 1, got {0}")]
    DegenerateCrossRatio(String),
    #[error("first two foliations are not dx and dy")]
    NotAdapted,
    #[error("cross-ratio is not constant")]
    NonConstantCrossRatio,
    #[error("expected a web of {expected} foliations, got {got}")]
    WrongFoliationCount { expected: usize, got: usize },

    #[error("Blaschke curvature vanishes at the origin")]
    NotCurvedAtOrigin,
    #[error("operation needs the strict normal form 1 + xy(1 + h)")]
    StrictFormRequired,

    #[error("r and s both vanish at the origin; no unit direction to march along")]
    NoUnitDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl Error {
    /// Stable machine-readable code, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VariableMismatch(_) => "VariableMismatch",
            Error::DivisionByNonUnit => "DivisionByNonUnit",
            Error::CompositionNotLocal => "CompositionNotLocal",
            Error::NotInvertibleAtOrigin => "NotInvertibleAtOrigin",
            Error::OrderExhausted(_) => "OrderExhausted",
            Error::FieldMismatch(_) => "FieldMismatch",
            Error::SingularFoliation => "SingularFoliation",
            Error::NotTransverse(_) => "NotTransverse",
            Error::DegenerateCrossRatio(_) => "DegenerateCrossRatio",
            Error::NotAdapted => "NotAdapted",
            Error::NonConstantCrossRatio => "NonConstantCrossRatio",
            Error::WrongFoliationCount { .. } => "WrongFoliationCount",
            Error::NotCurvedAtOrigin => "NotCurvedAtOrigin",
            Error::StrictFormRequired => "StrictFormRequired",
            Error::NoUnitDirection => "NoUnitDirection",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "Parse",
            Error::InternalInvariantViolation(_) => "InternalInvariantViolation",
        }
    }

    /// True for errors caused by degenerate mathematical data rather than
    /// malformed input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DivisionByNonUnit
                | Error::NotInvertibleAtOrigin
                | Error::SingularFoliation
                | Error::NotTransverse(_)
                | Error::DegenerateCrossRatio(_)
                | Error::NonConstantCrossRatio
                | Error::NotCurvedAtOrigin
                | Error::NoUnitDirection
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
