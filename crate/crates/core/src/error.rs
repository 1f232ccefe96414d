use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] NumericError),

    #[error("knot sequence is empty")]
    EmptyKnots,

    #[error("knots decrease at index {index}")]
    NotNonDecreasing { index: usize },

    #[error("knots must be strictly increasing (repeat at index {index})")]
    NotStrictlyIncreasing { index: usize },

    #[error("knot multiplicity {multiplicity} exceeds {allowed} (polynomial degree + 1)")]
    ExcessiveMultiplicity { multiplicity: usize, allowed: usize },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("degree {degree} needs {expected} knots, found {found}")]
    WrongKnotCount {
        degree: usize,
        expected: usize,
        found: usize,
    },

    #[error("constraint matrix is singular")]
    SingularMatrix,

    #[error("boundary unsupported: kernel support leaves the field domain at x = {points:?}")]
    BoundaryUnsupported { points: Vec<f64> },

    #[error("kernel scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
