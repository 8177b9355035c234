use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Engine(#[from] storval::Error),

    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{failed} of {total} reproduction checks failed")]
    Reproduction { failed: usize, total: usize },
}

impl CliError {
    /// 2 for anything the user can fix in the config, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        use storval::Error as E;
        match self {
            Self::ReadConfig { .. } | Self::Config(_) | Self::Usage(_) => 2,
            Self::Engine(
                E::Domain { .. }
                | E::InvalidContract(_)
                | E::OffGrid(_)
                | E::ActionNotAllowed { .. },
            ) => 2,
            Self::Engine(_) | Self::Reproduction { .. } => 3,
            Self::Write { .. } | Self::Csv(_) | Self::Json(_) => 1,
        }
    }
}
