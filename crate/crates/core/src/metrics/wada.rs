//! Wada test by merging.
//!
//! If every pair of basins shares the whole boundary, merging any two of
//! them leaves the boundary unchanged. Each unordered pair is merged and its
//! boundary compared with the original in both directions, up to a
//! Chebyshev fattening of `fattening_r` pixels.

use super::boundary::{boundary_mask, fatten, merge_labels};
use super::{MetricError, UNRESOLVED_WARNING_FRACTION};
use crate::grid::BasinGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WadaConfig {
    pub fattening_r: usize,
}

impl Default for WadaConfig {
    fn default() -> Self {
        WadaConfig { fattening_r: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotWadaReason {
    /// Fewer than three basins (unresolved pixels are not a basin).
    TooFewBasins { basins: usize },
    /// Merging this pair changed the boundary beyond the fattening margin.
    BoundaryChanged { label_a: u8, label_b: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WadaVerdict {
    Wada,
    NotWada(NotWadaReason),
}

impl WadaVerdict {
    pub fn is_wada(&self) -> bool {
        matches!(self, WadaVerdict::Wada)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub label_a: u8,
    pub label_b: u8,
    pub passed: bool,
    /// Merged-boundary pixels outside the fattened original boundary.
    pub merged_outside: usize,
    /// Original-boundary pixels outside the fattened merged boundary.
    pub original_outside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WadaReport {
    pub verdict: WadaVerdict,
    pub fattening_r: usize,
    pub boundary_pixels: usize,
    pub pairs: Vec<PairReport>,
    pub unresolved_fraction: f64,
    pub warning: Option<String>,
}

pub fn wada_test(grid: &BasinGrid, cfg: &WadaConfig) -> WadaReport {
    let basins = grid.present_labels();
    let unresolved_fraction = grid.unresolved_fraction();
    let warning = (unresolved_fraction > UNRESOLVED_WARNING_FRACTION).then(|| {
        format!(
            "{:.2}% of pixels are unresolved (threshold {:.0}%)",
            100.0 * unresolved_fraction,
            100.0 * UNRESOLVED_WARNING_FRACTION
        )
    });
    let original = boundary_mask(grid);
    let mut report = WadaReport {
        verdict: WadaVerdict::NotWada(NotWadaReason::TooFewBasins { basins: basins.len() }),
        fattening_r: cfg.fattening_r,
        boundary_pixels: original.count(),
        pairs: Vec::new(),
        unresolved_fraction,
        warning,
    };
    if basins.len() < 3 {
        return report;
    }

    let fat_original = fatten(&original, cfg.fattening_r);
    let pairs: Vec<(u8, u8)> = basins
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| basins[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    report.pairs = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<PairReport, MetricError> {
            let merged = boundary_mask(&merge_labels(grid, a, b)?);
            let merged_outside = merged.count_outside(&fat_original);
            let original_outside = original.count_outside(&fatten(&merged, cfg.fattening_r));
            Ok(PairReport {
                label_a: a,
                label_b: b,
                passed: merged_outside == 0 && original_outside == 0,
                merged_outside,
                original_outside,
            })
        })
        .collect::<Result<_, _>>()
        .expect("pairs drawn from present labels");

    report.verdict = match report.pairs.iter().find(|p| !p.passed) {
        None => WadaVerdict::Wada,
        Some(p) => WadaVerdict::NotWada(NotWadaReason::BoundaryChanged {
            label_a: p.label_a,
            label_b: p.label_b,
        }),
    };
    report
}
