use thiserror::Error;

/// Every failure the library can report. [`Error::name`] gives a stable
/// identifier used by the command line tool and the HTTP service.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Plücker condition violated (g·m = {value})")]
    PlueckerViolation { value: f64 },
    #[error("pose has vanishing primal part")]
    DegeneratePose,
    #[error("points coincide")]
    CoincidentPoints,
    #[error("Study condition violated (a·b = {value})")]
    StudyViolation { value: f64 },
    #[error("not a motion polynomial (dual part of the norm reaches {residual})")]
    NotAMotionPolynomial { residual: f64 },
    #[error("leading coefficient is not invertible")]
    NonInvertibleLeadingCoefficient,
    #[error("norm polynomial has a real root")]
    RealRootPresent,
    #[error("root finding did not converge")]
    RootFindingFailure,
    #[error("linear remainder is not invertible for this factor ordering")]
    NonGenericRemainder,
    #[error("only {found} factorization(s); a closed loop needs two")]
    FewerThanTwoFactorizations { found: usize },
    #[error("factor is a translation")]
    TranslationalFactor,
    #[error("no interpolating motion polynomial exists for these poses")]
    NoCubicInterpolant,
    #[error("interpolant has irrational coefficients; use floating point input")]
    IrrationalInterpolant,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("branch products differ (residual {residual})")]
    BranchMismatch { residual: f64 },
    #[error("degenerate segment at joint {joint}")]
    DegenerateSegment { joint: usize },
    #[error("parameter value is degenerate for this motion")]
    DegenerateParameter,
    #[error("unsupported format version {found}")]
    FormatVersionMismatch { found: String },
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("joint axes {i} and {j} coincide")]
    CoincidentAxes { i: usize, j: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::PlueckerViolation { .. } => "PlueckerViolation",
            Error::DegeneratePose => "DegeneratePose",
            Error::CoincidentPoints => "CoincidentPoints",
            Error::StudyViolation { .. } => "StudyViolation",
            Error::NotAMotionPolynomial { .. } => "NotAMotionPolynomial",
            Error::NonInvertibleLeadingCoefficient => "NonInvertibleLeadingCoefficient",
            Error::RealRootPresent => "RealRootPresent",
            Error::RootFindingFailure => "RootFindingFailure",
            Error::NonGenericRemainder => "NonGenericRemainder",
            Error::FewerThanTwoFactorizations { .. } => "FewerThanTwoFactorizations",
            Error::TranslationalFactor => "TranslationalFactor",
            Error::NoCubicInterpolant => "NoCubicInterpolant",
            Error::IrrationalInterpolant => "IrrationalInterpolant",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::BranchMismatch { .. } => "BranchMismatch",
            Error::DegenerateSegment { .. } => "DegenerateSegment",
            Error::DegenerateParameter => "DegenerateParameter",
            Error::FormatVersionMismatch { .. } => "FormatVersionMismatch",
            Error::ParseError(_) => "ParseError",
            Error::CoincidentAxes { .. } => "CoincidentAxes",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Input problems, as opposed to method failures on valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::PlueckerViolation { .. }
                | Error::CoincidentPoints
                | Error::StudyViolation { .. }
                | Error::FormatVersionMismatch { .. }
                | Error::ParseError(_)
                | Error::InvalidInput(_)
                | Error::DegenerateSegment { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
