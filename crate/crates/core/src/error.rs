use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown action `{name}` at offset {pos}")]
    UnknownAction { pos: usize, name: String },
    #[error("`tau` at offset {pos} is only available with a synchronising alphabet")]
    TauOutsideSync { pos: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("{0}")]
    SyncMismatch(String),
    #[error("expected a closed term, found variable `{0}`")]
    OpenTerm(String),
    #[error("unknown axiom system `{0}`")]
    UnknownSystem(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("alphabet too small: {0}")]
    AlphabetTooSmall(String),
    #[error("model: {0}")]
    Model(String),
    #[error("proof script: {0}")]
    Script(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
