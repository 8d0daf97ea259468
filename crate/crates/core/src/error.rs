use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("requires even ground set, got {0} users")]
    OddGround(usize),
    #[error("requires odd ground set of at least 3 users, got {0}")]
    EvenGround(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cache too small for level {level} with N_r = {uncached}")]
    CacheTooSmall { level: usize, uncached: usize },
    #[error("file {file} out of range 1..={files}")]
    FileOutOfRange { file: u32, files: usize },
    #[error("fallback required: fewer than two high-level users")]
    FallbackRequired,
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
