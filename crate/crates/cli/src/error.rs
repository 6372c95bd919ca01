use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qbird_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing input: {0}")]
    Missing(String),
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        use qbird_core::Error as E;
        match self {
            CliError::Core(E::QubitCap { .. }) => "qubit_cap",
            CliError::Core(E::EnumerationCap { .. }) => "enumeration_cap",
            CliError::Core(E::InvalidParameter(_)) => "invalid_parameter",
            CliError::Core(E::InvalidConfig(_)) | CliError::Config(_) => "invalid_config",
            CliError::Core(_) => "core",
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
            CliError::Missing(_) => "missing_input",
            CliError::Mismatch(_) => "parameter_mismatch",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Envelope<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Envelope {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error envelope serializes")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
