use std::path::PathBuf;
use thiserror::Error;

/// All errors surfaced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text was empty or whitespace-only.
    #[error("empty or whitespace-only text")]
    EmptyText,

    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArg(String),

    /// An I/O operation failed; `path` names the file involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A structured input file had a malformed record.
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A document contained no non-punctuation tokens.
    #[error("document '{0}' has no non-punctuation tokens")]
    DegenerateChapter(String),

    /// A segment id had no entry in the vector file.
    #[error("no vector for segment '{0}'")]
    MissingVector(String),

    /// A segment's vector had zero magnitude, so cosine is undefined.
    #[error("zero vector for segment '{0}'")]
    ZeroVector(String),

    /// Bracketed tree notation could not be parsed; `offset` is the byte
    /// position where parsing failed.
    #[error("tree parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A sentence had no parse tree in the supplied tree file.
    #[error("no parse tree for sentence '{0}'")]
    MissingParse(String),

    /// Too few data points for a statistical fit.
    #[error("need at least {need} pairs, got {got}")]
    InsufficientData { need: usize, got: usize },

    /// A ranking operation received an empty ranked list.
    #[error("empty ranking")]
    EmptyRanking,

    /// An operation that requires a sentence-level alignment received a
    /// summary-level one (or vice versa).
    #[error("wrong alignment kind: expected {expected}, got {got}")]
    WrongAlignmentKind { expected: String, got: String },

    /// An alignment referenced a segment id that the chapter does not have.
    #[error("alignment refers to unknown segment '{0}'")]
    InconsistentAlignment(String),

    /// An extract referenced a sentence id that the chapter does not have.
    #[error("extract refers to unknown sentence '{0}'")]
    InconsistentInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArg(message.into())
    }
}
