use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular matrix")]
    Singular,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("unbound slot {0}")]
    Unbound(usize),
    #[error("degenerate bound: {0}")]
    Degenerate(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
