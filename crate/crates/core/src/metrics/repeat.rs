//! Repeated Monte Carlo runs: the reported value of a metric is the mean
//! over `repeats` independent seeds.

use super::entropy::{basin_entropy, boundary_basin_entropy, EntropyConfig};
use super::fdim::{fractal_dimension, FDimConfig};
use super::MetricError;
use crate::grid::BasinGrid;
use serde::{Deserialize, Serialize};

pub const DEFAULT_REPEATS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Estimator {
    FractalDimension(FDimConfig),
    BasinEntropy(EntropyConfig),
    BoundaryBasinEntropy(EntropyConfig),
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::FractalDimension(_) => "fdim",
            Estimator::BasinEntropy(_) => "sb",
            Estimator::BoundaryBasinEntropy(_) => "sbb",
        }
    }

    /// Run once with the configured budget and the given seed.
    pub fn run(&self, grid: &BasinGrid, seed: u64) -> Result<f64, MetricError> {
        match self {
            Estimator::FractalDimension(cfg) => {
                fractal_dimension(grid, &FDimConfig { seed, ..cfg.clone() })
            }
            Estimator::BasinEntropy(cfg) => basin_entropy(grid, &EntropyConfig { seed, ..cfg.clone() }),
            Estimator::BoundaryBasinEntropy(cfg) => {
                boundary_basin_entropy(grid, &EntropyConfig { seed, ..cfg.clone() })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single repeat.
    pub std: f64,
    pub repeats: usize,
    pub samples: Vec<f64>,
}

impl MetricResult {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        MetricResult { mean, std, repeats: n, samples }
    }
}

/// Run `estimator` with seeds `base_seed .. base_seed + repeats`; any
/// failing repeat fails the whole call.
pub fn repeat_metric(
    estimator: &Estimator,
    grid: &BasinGrid,
    repeats: usize,
    base_seed: u64,
) -> Result<MetricResult, MetricError> {
    if repeats == 0 {
        return Err(MetricError::InvalidConfig("repeats must be >= 1".into()));
    }
    let samples = (0..repeats as u64)
        .map(|i| estimator.run(grid, base_seed.wrapping_add(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricResult::from_samples(samples))
}
