//! File formats, orientation smoothing and the synthetic scenario generator.

pub mod orientation;
pub mod scenario_file;
pub mod synth;
pub mod value_map;

use std::path::PathBuf;

use thiserror::Error;

pub use orientation::{circular_mean, circular_median, smooth_orientation, OrientationSeries, DEFAULT_WINDOW};
pub use scenario_file::{
    load_scenarios, parse_scenarios, save_scenarios, write_scenarios, FieldRecord, LoadOptions, LoadedScenarios,
    PlayerRecord, ScenarioRecord, FORMAT_NAME, FORMAT_VERSION,
};
pub use synth::{generate_synthetic, SynthConfig};
pub use value_map::{ValueMap, MAP_HEIGHT, MAP_WIDTH};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("header (line {line}): {message}")]
    Header { line: usize, message: String },
    #[error("record {index} (line {line}): {message}")]
    Record { index: usize, line: usize, message: String },
    #[error("{0}")]
    Orientation(String),
    #[error("value map (line {line}): {message}")]
    ValueMap { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::File {
            path: path.into(),
            source,
        }
    }
}
