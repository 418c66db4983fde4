//! Basin data model: a rectangular grid of attractor labels over a
//! phase-space rectangle, plus the label-level transforms every other
//! module relies on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Label reserved for trajectories that never classified.
pub const UNRESOLVED: u8 = 255;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("label array has {got} entries, expected {width}x{height}")]
    SizeMismatch { width: usize, height: usize, got: usize },
    #[error("grid dimensions must be non-zero")]
    Empty,
    #[error("label id {0} exceeds the 8-bit attractor range")]
    LabelOutOfRange(u8),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}

/// Phase-space rectangle discretized into `resolution` x `resolution` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: usize,
}

impl Region {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        resolution: usize,
    ) -> Result<Self, GridError> {
        let r = Region { x_min, x_max, y_min, y_max, resolution };
        r.validate()?;
        Ok(r)
    }

    /// Square region `[-half, half]^2`.
    pub fn centered(half: f64, resolution: usize) -> Result<Self, GridError> {
        Self::new(-half, half, -half, half, resolution)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(GridError::InvalidRegion("non-finite bound".into()));
        }
        if self.x_min >= self.x_max {
            return Err(GridError::InvalidRegion(format!(
                "x_min {} >= x_max {}",
                self.x_min, self.x_max
            )));
        }
        if self.y_min >= self.y_max {
            return Err(GridError::InvalidRegion(format!(
                "y_min {} >= y_max {}",
                self.y_min, self.y_max
            )));
        }
        if self.resolution < 2 {
            return Err(GridError::InvalidRegion(format!(
                "resolution {} < 2",
                self.resolution
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.resolution as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.resolution as f64
    }

    /// Phase-space point at the center of pixel (`col`, `row`).
    pub fn pixel_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.x_min + (col as f64 + 0.5) * self.dx(),
            self.y_min + (row as f64 + 0.5) * self.dy(),
        )
    }
}

/// Row-major grid of attractor labels.
///
/// `label_space` is the exclusive upper bound on attractor ids (ids live in
/// `0..label_space`, plus [`UNRESOLVED`]). Freshly generated grids have dense
/// ids, so `label_space == num_labels()`; merging basins can leave gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    width: usize,
    height: usize,
    labels: Vec<u8>,
    label_space: u8,
    region: Option<Region>,
}

impl BasinGrid {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Empty);
        }
        if labels.len() != width * height {
            return Err(GridError::SizeMismatch { width, height, got: labels.len() });
        }
        let max = labels.iter().copied().filter(|&l| l != UNRESOLVED).max();
        let label_space = match max {
            Some(m) => m + 1,
            None => 1,
        };
        Ok(BasinGrid { width, height, labels, label_space, region: None })
    }

    pub fn uniform(width: usize, height: usize, label: u8) -> Result<Self, GridError> {
        Self::new(width, height, vec![label; width * height])
    }

    /// Build a grid from a per-pixel function of `(col, row)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, GridError> {
        let mut labels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                labels.push(f(col, row));
            }
        }
        Self::new(width, height, labels)
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = Some(region);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u8> {
        self.labels
    }

    pub fn region(&self) -> Option<&Region> {
        self.region.as_ref()
    }

    pub fn label_space(&self) -> u8 {
        self.label_space
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.labels[row * self.width + col]
    }

    /// Number of distinct attractor ids present (unresolved excluded), at least 1.
    pub fn num_labels(&self) -> usize {
        self.present_labels().len().max(1)
    }

    /// Sorted distinct attractor ids present, unresolved excluded.
    pub fn present_labels(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (0..UNRESOLVED).filter(|&l| seen[l as usize]).collect()
    }

    pub fn unresolved_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == UNRESOLVED).count()
    }

    pub fn unresolved_fraction(&self) -> f64 {
        self.unresolved_count() as f64 / self.labels.len() as f64
    }

    /// Pixel count per label value (index 255 holds unresolved).
    pub fn label_counts(&self) -> [usize; 256] {
        let mut counts = [0usize; 256];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Reverse column order.
    pub fn flip_horizontal(&self) -> BasinGrid {
        let mut labels = self.labels.clone();
        for row in labels.chunks_mut(self.width) {
            row.reverse();
        }
        BasinGrid { labels, ..self.clone() }
    }

    /// Reverse row order.
    pub fn flip_vertical(&self) -> BasinGrid {
        let mut labels = Vec::with_capacity(self.labels.len());
        for row in self.labels.chunks(self.width).rev() {
            labels.extend_from_slice(row);
        }
        BasinGrid { labels, ..self.clone() }
    }

    /// Apply a bijection on `0..label_space`; `permutation[i]` is the new id of `i`.
    /// Unresolved pixels are left untouched.
    pub fn relabel(&self, permutation: &[u8]) -> Result<BasinGrid, GridError> {
        let n = self.label_space as usize;
        if permutation.len() != n {
            return Err(GridError::InvalidPermutation(format!(
                "expected {n} entries, got {}",
                permutation.len()
            )));
        }
        let mut hit = vec![false; n];
        for &p in permutation {
            if p as usize >= n || hit[p as usize] {
                return Err(GridError::InvalidPermutation(format!(
                    "{permutation:?} is not a bijection on 0..{n}"
                )));
            }
            hit[p as usize] = true;
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| if l == UNRESOLVED { l } else { permutation[l as usize] })
            .collect();
        Ok(BasinGrid { labels, ..self.clone() })
    }

    /// Rewrite ids so they appear in row-major first-occurrence order
    /// (0, 1, 2, ...). Returns the compacted grid and the old->new map.
    pub fn compact_first_occurrence(&self) -> (BasinGrid, Vec<(u8, u8)>) {
        let mut map = [UNRESOLVED; 256];
        let mut pairs = Vec::new();
        let mut next = 0u8;
        let labels: Vec<u8> = self
            .labels
            .iter()
            .map(|&l| {
                if l == UNRESOLVED {
                    return l;
                }
                if map[l as usize] == UNRESOLVED {
                    map[l as usize] = next;
                    pairs.push((l, next));
                    next += 1;
                }
                map[l as usize]
            })
            .collect();
        let mut out = BasinGrid::new(self.width, self.height, labels).expect("same shape");
        out.region = self.region;
        (out, pairs)
    }

    /// Replace labels in place while keeping shape and region.
    pub(crate) fn with_labels(&self, labels: Vec<u8>) -> BasinGrid {
        debug_assert_eq!(labels.len(), self.labels.len());
        BasinGrid { labels, ..self.clone() }
    }

    /// Copy out the `w` x `h` block whose top-left pixel is (`col`, `row`).
    pub fn crop(&self, col: usize, row: usize, w: usize, h: usize) -> Result<BasinGrid, GridError> {
        if col + w > self.width || row + h > self.height {
            return Err(GridError::InvalidRegion(format!(
                "{w}x{h} block at ({col}, {row}) exceeds the {}x{} grid",
                self.width, self.height
            )));
        }
        let mut labels = Vec::with_capacity(w * h);
        for r in row..row + h {
            let start = r * self.width + col;
            labels.extend_from_slice(&self.labels[start..start + w]);
        }
        BasinGrid::new(w, h, labels)
    }
}
