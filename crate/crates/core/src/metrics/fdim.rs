//! Monte Carlo box-counting estimate of the boundary dimension.
//!
//! For each box side ε, f(ε) is the fraction of randomly placed boxes that
//! hold at least two labels. Near a boundary of dimension d in the plane,
//! f(ε) ~ ε^(2 - d), so d = 2 - slope of log f against log ε.
//!
//! A box of side ε is the square of that side length (in pixel units) with
//! its center uniform over the grid, clipped at the edges. It touches
//! ε + 1 cells per axis; with this placement a straight boundary gives
//! f(ε) = ε / width exactly.

use super::fit::linear_fit;
use super::integral::EdgeIntegral;
use super::sampling::{centered_span, chunk_sizes, chunk_rng, sample_centered_box};
use super::MetricError;
use crate::grid::BasinGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Dimension of the phase plane.
const PHASE_DIM: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FDimConfig {
    pub eps_min: usize,
    pub eps_max: usize,
    pub eps_step: usize,
    pub boxes_per_size: usize,
    pub seed: u64,
}

impl Default for FDimConfig {
    fn default() -> Self {
        FDimConfig { eps_min: 3, eps_max: 33, eps_step: 3, boxes_per_size: 350_000, seed: 0 }
    }
}

impl FDimConfig {
    pub fn sizes(&self) -> Vec<usize> {
        (self.eps_min..=self.eps_max).step_by(self.eps_step.max(1)).collect()
    }

    pub fn validate(&self, grid: &BasinGrid) -> Result<(), MetricError> {
        if self.eps_min < 2 {
            return Err(MetricError::InvalidConfig("eps_min must be >= 2".into()));
        }
        if self.eps_step < 1 {
            return Err(MetricError::InvalidConfig("eps_step must be >= 1".into()));
        }
        if self.eps_max < self.eps_min {
            return Err(MetricError::InvalidConfig("eps_max < eps_min".into()));
        }
        if self.boxes_per_size < 1 {
            return Err(MetricError::InvalidConfig("boxes_per_size must be >= 1".into()));
        }
        let limit = grid.width().min(grid.height());
        if self.eps_max > limit {
            return Err(MetricError::BoxTooLarge {
                box_size: self.eps_max,
                width: grid.width(),
                height: grid.height(),
            });
        }
        Ok(())
    }
}

/// One point of the uncertainty curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyPoint {
    pub eps: usize,
    pub uncertain: u64,
    pub total: u64,
}

impl UncertaintyPoint {
    pub fn fraction(&self) -> f64 {
        self.uncertain as f64 / self.total as f64
    }
}

/// Monte Carlo f(ε) for every configured size.
pub fn uncertainty_curve(
    grid: &BasinGrid,
    cfg: &FDimConfig,
) -> Result<Vec<UncertaintyPoint>, MetricError> {
    cfg.validate(grid)?;
    let edges = EdgeIntegral::new(grid);
    let (w, h) = (grid.width(), grid.height());
    let points = cfg
        .sizes()
        .into_iter()
        .enumerate()
        .map(|(k, eps)| {
            let chunks: Vec<(u64, usize)> = chunk_sizes(cfg.boxes_per_size).collect();
            let uncertain: u64 = chunks
                .par_iter()
                .map(|&(chunk, n)| {
                    let mut rng = chunk_rng(cfg.seed, ((k as u64) << 32) | chunk);
                    (0..n)
                        .filter(|_| {
                            let (c0, c1, r0, r1) = sample_centered_box(&mut rng, eps, w, h);
                            edges.mixed(c0, c1, r0, r1)
                        })
                        .count() as u64
                })
                .sum();
            UncertaintyPoint { eps, uncertain, total: cfg.boxes_per_size as u64 }
        })
        .collect();
    Ok(points)
}

/// f(ε) averaged over every box placement (all half-pixel center slots),
/// i.e. the expectation of the Monte Carlo estimate.
pub fn uncertain_fraction_exhaustive(grid: &BasinGrid, eps: usize) -> UncertaintyPoint {
    let edges = EdgeIntegral::new(grid);
    exhaustive_point(grid, &edges, eps)
}

fn exhaustive_point(grid: &BasinGrid, edges: &EdgeIntegral, eps: usize) -> UncertaintyPoint {
    let (w, h) = (grid.width(), grid.height());
    let cols: Vec<(usize, usize)> = (0..2 * w).map(|s| centered_span(s, eps, w)).collect();
    let uncertain: u64 = (0..2 * h)
        .into_par_iter()
        .map(|sy| {
            let (r0, r1) = centered_span(sy, eps, h);
            cols.iter().filter(|&&(c0, c1)| edges.mixed(c0, c1, r0, r1)).count() as u64
        })
        .sum();
    UncertaintyPoint { eps, uncertain, total: 4 * (w * h) as u64 }
}

pub fn uncertainty_curve_exhaustive(
    grid: &BasinGrid,
    cfg: &FDimConfig,
) -> Result<Vec<UncertaintyPoint>, MetricError> {
    cfg.validate(grid)?;
    let edges = EdgeIntegral::new(grid);
    Ok(cfg.sizes().into_iter().map(|eps| exhaustive_point(grid, &edges, eps)).collect())
}

/// Dimension from an uncertainty curve; sizes with no uncertain box are dropped.
pub(crate) fn dimension_from_curve(points: &[UncertaintyPoint]) -> Result<f64, MetricError> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.uncertain > 0)
        .map(|p| ((p.eps as f64).ln(), p.fraction().ln()))
        .collect();
    match xy.len() {
        0 => Err(MetricError::NoBoundaryDetected),
        1 => Err(MetricError::InsufficientScaling(1)),
        _ => Ok(PHASE_DIM - linear_fit(&xy)?.slope),
    }
}

pub fn fractal_dimension(grid: &BasinGrid, cfg: &FDimConfig) -> Result<f64, MetricError> {
    dimension_from_curve(&uncertainty_curve(grid, cfg)?)
}

pub fn fractal_dimension_exhaustive(grid: &BasinGrid, cfg: &FDimConfig) -> Result<f64, MetricError> {
    dimension_from_curve(&uncertainty_curve_exhaustive(grid, cfg)?)
}
