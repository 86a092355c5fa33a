use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] astrogibbs::Error),

    #[error("{0}")]
    Usage(String),

    #[error("input {path} changed since the manifest was written")]
    InputChanged { path: String },

    #[error("replayed outputs differ from the manifest: {}", files.join(", "))]
    ReplayMismatch { files: Vec<String> },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::InputChanged { .. } => "input_changed",
            CliError::ReplayMismatch { .. } => "replay_mismatch",
        }
    }

    /// Process exit status: 2 for bad invocations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON report, as written to stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Report<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Report {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error report serializes")
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}
