use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {entity}: {message}")]
    Validation { entity: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: retrodict::Error,
    },
}

impl CliError {
    pub fn validation(entity: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation {
            entity: entity.into(),
            message: message.to_string(),
        }
    }

    pub fn core(context: impl Into<String>, source: retrodict::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// Core errors met while loading: numerical ones keep their identity so
    /// they map to exit code 3, the rest are validation failures.
    pub fn at(entity: impl Into<String>, source: retrodict::Error) -> Self {
        if source.is_numerical() {
            Self::core(entity, source)
        } else {
            Self::validation(entity, source)
        }
    }

    /// 3 for numerical invariant violations, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if source.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core { source, .. } if source.is_numerical() => "numerical",
            CliError::Core { .. } => "domain",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
