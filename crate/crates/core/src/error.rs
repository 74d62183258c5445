use std::path::PathBuf;

use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no neighbors to rank")]
    NoNeighbors,

    #[error("no usable next hop")]
    NoRoute,

    #[error("probe rank {rank} out of range 1..={count}")]
    RankOutOfRange { rank: usize, count: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),

    #[error("node {0} has no geographic position")]
    MissingGeo(NodeId),

    #[error("topology is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("target average degree {target} unattainable, best achieved {achieved:.3}")]
    DegreeUnattainable { target: f64, achieved: f64 },

    #[error("rescaling produced an empty topology")]
    EmptyTopology,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("ping schedules differ between runs: {0}")]
    ScheduleMismatch(String),

    #[error("malformed log line {line}: {reason}")]
    MalformedLog { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// True for errors caused by bad inputs, as opposed to failures while
    /// running or writing results.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::NoRoute | Error::NoNeighbors)
    }
}
