use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin magnitude must be a positive half-integer, got {0}")]
    InvalidSpin(f64),

    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("seed finite-time exponent {exponent:.4} per kick is below {threshold}; no chaotic sea")]
    RegularSeed { exponent: f64, threshold: f64 },

    #[error("invalid thresholds: regular {regular}, chaotic {chaotic}")]
    InvalidThresholds { regular: f64, chaotic: f64 },

    #[error("series is missing the required time t = {0}")]
    MissingTime(u32),

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("at least {needed} samples required, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("correlation undefined: zero variance in {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed eigenvector dump: {0}")]
    MalformedDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
