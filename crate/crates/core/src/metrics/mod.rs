//! Basin characterization: uncertainty (box-counting) dimension, basin
//! entropy, boundary basin entropy and the Wada merging test.
//!
//! All Monte Carlo estimators split their box budget into fixed chunks of
//! [`CHUNK_BOXES`] draws. Chunk `c` reads its own ChaCha8 stream, so
//! results are bit-identical for any number of worker threads.

mod boundary;
mod entropy;
mod fdim;
mod fit;
mod integral;
mod repeat;
mod sampling;
mod wada;

pub use boundary::{boundary_mask, fatten, merge_labels, Mask};
pub use entropy::{
    basin_entropy, basin_entropy_exhaustive, boundary_basin_entropy, entropy_exhaustive,
    boundary_basin_entropy_exhaustive, box_entropy, entropy_estimate, EntropyConfig,
    EntropyEstimate,
};
pub use fdim::{
    fractal_dimension, fractal_dimension_exhaustive, uncertain_fraction_exhaustive,
    uncertainty_curve, uncertainty_curve_exhaustive, FDimConfig, UncertaintyPoint,
};
pub use fit::{linear_fit, FitResult};
pub use repeat::{repeat_metric, Estimator, MetricResult, DEFAULT_REPEATS};
pub use sampling::{chunk_rng, sample_box, sample_centered_box, CHUNK_BOXES};
pub use wada::{wada_test, NotWadaReason, PairReport, WadaConfig, WadaReport, WadaVerdict};

use thiserror::Error;

/// Share of unresolved pixels above which reports carry a data-quality warning.
pub const UNRESOLVED_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetricError {
    #[error("box of side {box_size} does not fit a {width}x{height} grid")]
    BoxTooLarge { box_size: usize, width: usize, height: usize },
    #[error("no uncertain box at any scale")]
    NoBoundaryDetected,
    #[error("only {0} box size(s) had uncertain boxes; need at least 2 for a fit")]
    InsufficientScaling(usize),
    #[error("no box containing a boundary among the sampled boxes")]
    NoBoundarySampled,
    #[error("label {0} is not present in the grid")]
    LabelNotFound(u8),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid metric config: {0}")]
    InvalidConfig(String),
}

impl MetricError {
    /// Stable short name used in reports and manifests.
    pub fn code(&self) -> &'static str {
        match self {
            MetricError::BoxTooLarge { .. } => "BoxTooLarge",
            MetricError::NoBoundaryDetected => "NoBoundaryDetected",
            MetricError::InsufficientScaling(_) => "InsufficientScaling",
            MetricError::NoBoundarySampled => "NoBoundarySampled",
            MetricError::LabelNotFound(_) => "LabelNotFound",
            MetricError::DegenerateFit(_) => "DegenerateFit",
            MetricError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

/// Scale a Monte Carlo budget, keeping at least one box.
pub fn scale_budget(n: usize, scale: f64) -> usize {
    ((n as f64 * scale).round() as usize).max(1)
}
