use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path} is not valid UTF-8 (invalid byte at offset {offset})")]
    Decode { path: PathBuf, offset: usize },

    #[error("corpus `{id}` is empty after normalization")]
    EmptyCorpus { id: String },

    #[error("line {line}: reserved code point U+{code:04X} in input")]
    ReservedCodePoint { line: usize, code: u32 },

    #[error("line {line}: malformed EVA markup: {reason}")]
    MalformedEva { line: usize, reason: String },

    #[error("n-gram order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("token stream is empty")]
    EmptyStream,

    #[error("no prediction tokens: every sentence is shorter than n = {n}")]
    NoPredictionTokens { n: usize },

    #[error("model of order {model} cannot score with order {requested}")]
    OrderMismatch { model: usize, requested: usize },

    #[error("need at least {needed} sentences, got {got}")]
    TooFewSentences { needed: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("need at least {needed} curve points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
