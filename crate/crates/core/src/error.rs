use std::path::PathBuf;

use thiserror::Error;

use crate::ratemodel::FeasibilityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    #[error("WiFi link ({0}, {0}) is undefined: a node has no WiFi link to itself")]
    UndefinedPair(usize),

    #[error("no WiFi link from {hotspot} to {client} in the current assignment")]
    UndefinedLink { hotspot: usize, client: usize },

    #[error("hotspot count must lie in 1..={n}, got {h}")]
    HotspotCount { h: usize, n: usize },

    #[error("node {0} is not a hotspot")]
    NotHotspot(usize),

    #[error("malformed assignment: {0}")]
    Assignment(String),

    #[error("assignment is infeasible ({} violation(s))", .0.violations.len())]
    Infeasible(Box<FeasibilityReport>),

    #[error("exhaustive search refused: {n} nodes exceeds the size guard of {max_n}")]
    SizeGuard { n: usize, max_n: usize },

    #[error("graph structure: {0}")]
    Structure(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::SizeGuard { .. } => 3,
            Error::Io { .. } | Error::Csv(_) => 4,
            _ => 2,
        }
    }
}
