use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    /// Also raised for a name declared twice.
    #[error("unresolved name `{name}` at line {line}: {msg}")]
    UnresolvedName { name: String, line: usize, msg: String },
    #[error("boundary mismatch at line {line}: {msg}")]
    BoundaryMismatch { line: usize, msg: String },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("line {line}: {source}")]
    Build { line: usize, source: groupoidal::Error },
    #[error(transparent)]
    Library(#[from] groupoidal::Error),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
