//! Command-line front end for `wpp-core`: per-triple reports, range scans and
//! figure output.

pub mod checks;
pub mod render;
pub mod report;

use thiserror::Error;
use wpp_core::{PolygonError, ResolutionError};

/// Environment variable overriding the default truncation schedule.
pub const EPS_ENV: &str = "WPP_EPS_SCHEDULE";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad weights, flags or schedules.
    #[error("{0}")]
    Input(String),
    /// A checked statement failed; this is an implementation bug.
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Violation(_) => 3,
        }
    }
}

impl From<ResolutionError> for CliError {
    fn from(e: ResolutionError) -> Self {
        match &e {
            ResolutionError::Arith(_)
            | ResolutionError::Polygon(
                PolygonError::BadSchedule(_) | PolygonError::BadPresentation(_) | PolygonError::ChopsOverlap { .. },
            ) => CliError::Input(format!("{e:?}: {e}")),
            _ => CliError::Violation(e.to_string()),
        }
    }
}

/// The schedule from `--eps`, else the environment, else `default`.
pub fn eps_text(flag: Option<&str>) -> String {
    match flag {
        Some(s) => s.to_string(),
        None => std::env::var(EPS_ENV).unwrap_or_else(|_| "default".into()),
    }
}
