//! File formats: JSON map and scenario files, ASCII PGM occupancy grids,
//! path CSV, metrics JSON and SVG rendering.

mod map_file;
mod output;
mod pgm;
mod svg;

use std::path::PathBuf;

use thiserror::Error;

pub use map_file::{
    load_map, load_scenarios, map_from_file, map_report, GridRef, LaneRelations, LaneSpec,
    LoadReport, MapFile, PotentialSpec, RegionSpec, Scenario, ScenarioFile, SCHEMA_VERSION,
};
pub use output::{
    read_path_csv, write_metrics_json, write_path_csv, write_path_csv_to, MetricsJson,
};
pub use pgm::{load_occupancy, parse_pgm, write_pgm};
pub use svg::{render_svg, write_svg};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: parse error: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("{path}: {field}: {msg}")]
    Validation {
        path: PathBuf,
        field: String,
        msg: String,
    },
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        IoError::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(
        path: impl Into<PathBuf>,
        field: impl Into<String>,
        msg: impl Into<String>,
    ) -> Self {
        IoError::Validation {
            path: path.into(),
            field: field.into(),
            msg: msg.into(),
        }
    }
}
