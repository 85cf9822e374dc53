use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment `{id}`; registered experiments: {known}")]
    UnknownExperiment { id: String, known: String },

    #[error("experiment `{experiment}`: parameter `{name}`: {reason}")]
    Param {
        experiment: String,
        name: String,
        reason: String,
    },

    #[error("experiment `{experiment}`: {source}")]
    Core {
        experiment: String,
        #[source]
        source: lqgsim_core::Error,
    },

    #[error("experiment `{experiment}`: {source}")]
    Maps {
        experiment: String,
        #[source]
        source: lqgsim_maps::MapError,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("schema mismatch in {context}: expected `{expected}`, found `{found}`")]
    SchemaMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("a report needs at least one run record")]
    EmptyReport,
}

pub type Result<T> = std::result::Result<T, HarnessError>;
