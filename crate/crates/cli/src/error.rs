use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    /// Classifies a library error, prefixing the cell or corpus it came from.
    pub fn from_core(context: &str, err: dirgram::Error) -> Self {
        use dirgram::Error as E;
        let msg = if context.is_empty() {
            err.to_string()
        } else {
            format!("[{context}] {err}")
        };
        match err {
            E::InvalidOrder(_) | E::InvalidParameter(_) | E::OrderMismatch { .. } => {
                CliError::Config(msg)
            }
            E::EmptySample => CliError::Numeric(msg),
            E::Io { .. }
            | E::Decode { .. }
            | E::EmptyCorpus { .. }
            | E::ReservedCodePoint { .. }
            | E::MalformedEva { .. }
            | E::EmptyStream
            | E::NoPredictionTokens { .. }
            | E::TooFewSentences { .. }
            | E::TooFewPoints { .. } => CliError::Data(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn ensure_finite(context: &str, values: &[(&str, f64)]) -> CliResult<()> {
    match values.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(CliError::Numeric(format!("[{context}] {name} is {v}"))),
        None => Ok(()),
    }
}
