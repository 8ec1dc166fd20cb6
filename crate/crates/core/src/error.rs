use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong while reading one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    DuplicateGenerator(String),
    UnknownGenerator(String),
    MissingAssignment(String),
    DuplicateAssignment(String),
    BadExponent(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::DuplicateGenerator(g) => write!(f, "duplicate generator `{g}`"),
            ParseErrorKind::UnknownGenerator(g) => write!(f, "unknown generator `{g}`"),
            ParseErrorKind::MissingAssignment(g) => {
                write!(f, "no image assigned to source generator `{g}`")
            }
            ParseErrorKind::DuplicateAssignment(g) => {
                write!(f, "source generator `{g}` assigned twice")
            }
            ParseErrorKind::BadExponent(t) => write!(f, "bad exponent in token `{t}`"),
        }
    }
}

/// A located parse failure. Line and column are 1-based; column 0 means the
/// whole line (or the whole input when line is 0).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid word: generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },

    #[error("truncation too large: {generators}^{degree} exceeds the basis bound {bound}")]
    DegreeOverflow {
        generators: usize,
        degree: usize,
        bound: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Laurent ring mismatch: {0} vs {1} variables")]
    VariableMismatch(usize, usize),

    #[error("too many Laurent variables: {0} (at most {max})", max = crate::laurent::MAX_VARS)]
    TooManyVariables(usize),

    #[error("homomorphism is not well defined: relator {relator} fails at degree {degree}")]
    NotWellDefined { relator: usize, degree: usize },

    #[error("inconsistent PBW inversion at degree {degree}: l = {value}")]
    InconsistentPbw { degree: usize, value: i128 },

    #[error("Lie extraction: bracket span in degree {degree} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        degree: usize,
        found: usize,
        expected: usize,
    },

    #[error("negative Dwyer quotient dimension at n = {n}: {value}")]
    NegativeDimension { n: usize, value: i64 },

    #[error("presentations must be flagged aspherical for H2 quantities: {0}")]
    RequiresAsphericalFlag(String),

    #[error("cycle {index} is not a cycle (nonzero boundary)")]
    NotACycle { index: usize },

    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),

    #[error("invalid coefficient system: relator {relator} has nonzero image")]
    InvalidCoefficientSystem { relator: usize },

    #[error("link data: {0}")]
    Link(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
