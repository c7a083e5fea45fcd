//! Experiment orchestration for the `lab` command line tool: declarative
//! plans, reproducible sweeps over the registered strategies, persistent
//! run records, and CSV/JSON/SVG reports.

pub mod plan;
pub mod record;
pub mod report;
pub mod svg;
pub mod sweep;

use thiserror::Error;

/// Errors surfaced by the harness, mapped to process exit codes:
/// invalid configuration exits 2, resource-cap violations exit 3,
/// everything else exits 1.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] qlab_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(qlab_core::Error::ResourceLimit(_)) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
