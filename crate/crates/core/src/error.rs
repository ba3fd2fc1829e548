use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target {index} at sample ({row:.3}, {col:.3}) lies outside the {rows}x{cols} raster")]
    OutOfBounds {
        index: usize,
        row: f64,
        col: f64,
        rows: usize,
        cols: usize,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: u64, actual: u64 },
    #[error("dimension mismatch: expected {expected}, found {actual}")]
    Dimension { expected: String, actual: String },
    #[error("integration diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },
    #[error("simulation error: {0}")]
    Simulation(String),
    #[error("band allocation error: {0}")]
    Allocation(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("window of size {window} at pixel ({row}, {col}) is clipped by the {rows}x{cols} raster")]
    WindowClipped {
        row: usize,
        col: usize,
        window: usize,
        rows: usize,
        cols: usize,
    },
    #[error("incomplete track: missing band indices {missing:?}")]
    Assembly { missing: Vec<usize> },
    #[error("ill-conditioned normal matrix (condition {condition:.3e}); use reg > 0")]
    IllConditioned { condition: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
