use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("invalid channel parameters: {0}")]
    Channel(String),

    #[error("sector {sector} belongs to BS {bs}, which is switched off")]
    InactiveSector { sector: usize, bs: usize },

    #[error("no active sector available for association")]
    NoActiveSector,

    #[error("invalid CoMP configuration: {0}")]
    CompConfig(String),

    #[error("invalid BSS pattern: {0}")]
    Pattern(String),

    #[error("pattern list is empty")]
    EmptyPatternList,

    #[error("exhaustive search over {0} BSs exceeds the enumeration bound of {max}", max = crate::bss::MAX_ORACLE_BSS)]
    OracleBound(usize),

    #[error("drop contains no users in the center cluster")]
    EmptyDrop,

    #[error("invalid MCS table: {0}")]
    Mcs(String),

    #[error("invalid campaign configuration: {0}")]
    Config(String),

    #[error("figure `{figure}` needs a sweep over `{axis}`")]
    MissingAxis { figure: String, axis: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration rather than by
    /// the computation itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Layout(_)
                | Error::Channel(_)
                | Error::CompConfig(_)
                | Error::Pattern(_)
                | Error::EmptyPatternList
                | Error::OracleBound(_)
                | Error::Mcs(_)
                | Error::Config(_)
                | Error::MissingAxis { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
