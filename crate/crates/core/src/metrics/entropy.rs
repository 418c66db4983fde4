//! Basin entropy and boundary basin entropy.
//!
//! Boxes of `box_size` x `box_size` pixels are thrown uniformly, fully inside
//! the grid. Each box contributes the Gibbs entropy `-sum p ln p` of its label
//! proportions. Sb averages over all boxes, Sbb only over boxes holding two
//! or more labels. Unresolved pixels count as one more color.
//!
//! A box's entropy depends only on its multiset of label counts, so boxes
//! are tallied by sorted count vector and the tally is reduced in key order.
//! The result is exactly independent of chunk scheduling, flips and label
//! permutations.

use super::integral::LabelIntegral;
use super::sampling::{chunk_rng, chunk_sizes, sample_box};
use super::MetricError;
use crate::grid::BasinGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyConfig {
    pub box_size: usize,
    pub n_boxes: usize,
    pub seed: u64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig { box_size: 15, n_boxes: 350_000, seed: 0 }
    }
}

impl EntropyConfig {
    fn validate(&self, grid: &BasinGrid) -> Result<(), MetricError> {
        if self.box_size < 2 {
            return Err(MetricError::InvalidConfig("box_size must be >= 2".into()));
        }
        if self.n_boxes < 1 {
            return Err(MetricError::InvalidConfig("n_boxes must be >= 1".into()));
        }
        if self.box_size > grid.width() || self.box_size > grid.height() {
            return Err(MetricError::BoxTooLarge {
                box_size: self.box_size,
                width: grid.width(),
                height: grid.height(),
            });
        }
        Ok(())
    }
}

/// Sb and Sbb from one set of boxes, with Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub sb: f64,
    pub sb_std_err: f64,
    /// `None` when no sampled box straddled a boundary.
    pub sbb: Option<f64>,
    pub sbb_std_err: Option<f64>,
    pub boxes: u64,
    pub boundary_boxes: u64,
}

/// Entropy of the labels in the `size` x `size` box at (`col`, `row`).
pub fn box_entropy(grid: &BasinGrid, col: usize, row: usize, size: usize) -> f64 {
    let mut counts = [0u32; 256];
    for r in row..row + size {
        for c in col..col + size {
            counts[grid.get(c, r) as usize] += 1;
        }
    }
    let mut nonzero: Vec<u32> = counts.iter().copied().filter(|&n| n > 0).collect();
    nonzero.sort_unstable();
    gibbs_entropy(&nonzero)
}

fn gibbs_entropy(counts: &[u32]) -> f64 {
    let total: u32 = counts.iter().sum();
    let total = total as f64;
    counts
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let p = n as f64 / total;
            -p * p.ln()
        })
        .sum()
}

type Tally = HashMap<Vec<u32>, u64>;

fn add_box(tally: &mut Tally, counts: &mut [u32]) {
    counts.sort_unstable();
    if let Some(m) = tally.get_mut(&*counts) {
        *m += 1;
    } else {
        tally.insert(counts.to_vec(), 1);
    }
}

fn merge_tallies(mut a: Tally, b: Tally) -> Tally {
    for (k, m) in b {
        *a.entry(k).or_insert(0) += m;
    }
    a
}

fn summarize(tally: Tally) -> EntropyEstimate {
    let mut keys: Vec<(Vec<u32>, u64)> = tally.into_iter().collect();
    keys.sort_unstable();
    let (mut n, mut sum, mut sum_sq) = (0u64, 0.0f64, 0.0f64);
    let (mut nb, mut bsum, mut bsum_sq) = (0u64, 0.0f64, 0.0f64);
    for (counts, m) in &keys {
        let h = gibbs_entropy(counts);
        let mf = *m as f64;
        n += m;
        sum += mf * h;
        sum_sq += mf * h * h;
        if counts.len() >= 2 {
            nb += m;
            bsum += mf * h;
            bsum_sq += mf * h * h;
        }
    }
    let std_err = |count: u64, s: f64, s2: f64| {
        if count < 2 {
            return 0.0;
        }
        let c = count as f64;
        let mean = s / c;
        let var = ((s2 - c * mean * mean) / (c - 1.0)).max(0.0);
        (var / c).sqrt()
    };
    EntropyEstimate {
        sb: sum / n as f64,
        sb_std_err: std_err(n, sum, sum_sq),
        sbb: (nb > 0).then(|| bsum / nb as f64),
        sbb_std_err: (nb > 0).then(|| std_err(nb, bsum, bsum_sq)),
        boxes: n,
        boundary_boxes: nb,
    }
}

/// Monte Carlo Sb and Sbb from the same `n_boxes` random boxes.
pub fn entropy_estimate(grid: &BasinGrid, cfg: &EntropyConfig) -> Result<EntropyEstimate, MetricError> {
    cfg.validate(grid)?;
    let integral = LabelIntegral::new(grid);
    let (w, h, s) = (grid.width(), grid.height(), cfg.box_size);
    let chunks: Vec<(u64, usize)> = chunk_sizes(cfg.n_boxes).collect();
    let tallies: Vec<Tally> = chunks
        .par_iter()
        .map(|&(chunk, n)| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            let mut tally = Tally::new();
            let mut counts = Vec::with_capacity(8);
            for _ in 0..n {
                let (col, row) = sample_box(&mut rng, s, w, h).expect("validated box size");
                integral.box_counts(col, row, s, &mut counts);
                add_box(&mut tally, &mut counts);
            }
            tally
        })
        .collect();
    Ok(summarize(tallies.into_iter().fold(Tally::new(), merge_tallies)))
}

/// Sb and Sbb averaged over every fully-inside box position.
pub fn entropy_exhaustive(grid: &BasinGrid, box_size: usize) -> Result<EntropyEstimate, MetricError> {
    let cfg = EntropyConfig { box_size, n_boxes: 1, seed: 0 };
    cfg.validate(grid)?;
    let integral = LabelIntegral::new(grid);
    let (w, h) = (grid.width(), grid.height());
    let tally = (0..=h - box_size)
        .into_par_iter()
        .map(|row| {
            let mut tally = Tally::new();
            let mut counts = Vec::with_capacity(8);
            for col in 0..=w - box_size {
                integral.box_counts(col, row, box_size, &mut counts);
                add_box(&mut tally, &mut counts);
            }
            tally
        })
        .reduce(Tally::new, merge_tallies);
    Ok(summarize(tally))
}

/// Basin entropy Sb, in `[0, ln N]` for `N` colors.
pub fn basin_entropy(grid: &BasinGrid, cfg: &EntropyConfig) -> Result<f64, MetricError> {
    Ok(entropy_estimate(grid, cfg)?.sb)
}

/// Boundary basin entropy Sbb; sampled boxes without a boundary are dropped.
pub fn boundary_basin_entropy(grid: &BasinGrid, cfg: &EntropyConfig) -> Result<f64, MetricError> {
    entropy_estimate(grid, cfg)?.sbb.ok_or(MetricError::NoBoundarySampled)
}

pub fn basin_entropy_exhaustive(grid: &BasinGrid, box_size: usize) -> Result<f64, MetricError> {
    Ok(entropy_exhaustive(grid, box_size)?.sb)
}

pub fn boundary_basin_entropy_exhaustive(
    grid: &BasinGrid,
    box_size: usize,
) -> Result<f64, MetricError> {
    entropy_exhaustive(grid, box_size)?.sbb.ok_or(MetricError::NoBoundarySampled)
}
