//! Dataset building: tiling 1000x1000 basins into 333x333 images, labeling
//! them with repeated metrics, and persisting PNG images plus a CSV manifest.

mod image;
mod label;
mod manifest;
mod seed;
mod stats;
mod sweep;
mod tile;

pub use image::{read_basin_image, write_basin_image};
pub use label::{label_basin, BasinLabels, LabelBudgets};
pub use manifest::{read_manifest, write_manifest, ManifestRecord, Split, MANIFEST_HEADER};
pub use seed::derive_seed;
pub use stats::{histograms, write_histograms, Histogram, HISTOGRAM_HEADER};
pub use sweep::{run_sweep, ParamSpec, PlanEntry, SweepPlan, SweepSummary};
pub use tile::{tile_basin, DOWNSAMPLE_TILE, SOURCE_SIZE, TILES_PER_BASIN, TILE_SIZE};

use crate::grid::GridError;
use crate::systems::{SystemError, SystemKind};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("expected a {expected}x{expected} grid, got {width}x{height}")]
    SizeMismatch { expected: usize, width: usize, height: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Image { path: PathBuf, message: String },
    #[error("manifest line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid sweep plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    System(#[from] SystemError),
}

impl DatasetError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DatasetError::Io { path: path.into(), source }
    }
}

/// Duffing and Newton train, pendulum and Hénon-Heiles validate, the
/// magnetic pendulum is held out for testing.
pub fn split_for_system(system: SystemKind) -> Split {
    match system {
        SystemKind::Duffing | SystemKind::Newton => Split::Train,
        SystemKind::Pendulum | SystemKind::HenonHeiles => Split::Validation,
        SystemKind::MagneticPendulum => Split::Test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits() {
        assert_eq!(split_for_system(SystemKind::Duffing), Split::Train);
        assert_eq!(split_for_system(SystemKind::Newton), Split::Train);
        assert_eq!(split_for_system(SystemKind::HenonHeiles), Split::Validation);
        assert_eq!(split_for_system(SystemKind::Pendulum), Split::Validation);
        assert_eq!(split_for_system(SystemKind::MagneticPendulum), Split::Test);
    }
}
