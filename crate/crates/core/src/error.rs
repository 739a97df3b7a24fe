use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JawsError {
    #[error("observable spectrum is identically zero after shifting its minimum to 0")]
    DegenerateObservable,

    #[error("basis element {index} fails orthonormality (inner product deviation {deviation:e})")]
    NonOrthonormalBasis { index: usize, deviation: f64 },

    #[error("element has zero norm in the defining representation")]
    DegenerateElement,

    #[error("component {component}: {reason}")]
    DegenerateComponent { component: usize, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Undefined(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("need at least 3 sizes to fit a trend, got {0}")]
    TrendUnfit(usize),

    #[error("precondition not met: {0}")]
    NotApplicable(String),

    #[error("pauli parse error at line {line}, column {column}: {message}")]
    PauliParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("model file, line {line}, column {column}, at `{field}`: {message}")]
    ModelParse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, JawsError>;
