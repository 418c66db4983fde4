//! Summed-area tables over a label grid, for O(1) box queries.

use crate::grid::BasinGrid;

/// 2-D prefix sum of a 0/1 (or count) field of size `w` x `h`.
#[derive(Debug, Clone)]
pub(crate) struct SummedArea {
    w: usize,
    table: Vec<u32>,
}

impl SummedArea {
    pub(crate) fn new(w: usize, h: usize, value: impl Fn(usize, usize) -> u32) -> Self {
        let stride = w + 1;
        let mut table = vec![0u32; stride * (h + 1)];
        for r in 0..h {
            let mut row_sum = 0u32;
            for c in 0..w {
                row_sum += value(c, r);
                table[(r + 1) * stride + c + 1] = table[r * stride + c + 1] + row_sum;
            }
        }
        SummedArea { w, table }
    }

    /// Sum over columns `c0..c1` and rows `r0..r1` (half-open).
    #[inline]
    pub(crate) fn sum(&self, c0: usize, c1: usize, r0: usize, r1: usize) -> u32 {
        if c0 >= c1 || r0 >= r1 {
            return 0;
        }
        let s = self.w + 1;
        self.table[r1 * s + c1] + self.table[r0 * s + c0]
            - self.table[r0 * s + c1]
            - self.table[r1 * s + c0]
    }
}

/// Adjacent-pair disagreement tables: a rectangle holds two or more labels
/// iff it contains a 4-adjacent pair of differing pixels.
#[derive(Debug, Clone)]
pub(crate) struct EdgeIntegral {
    horizontal: SummedArea,
    vertical: SummedArea,
}

impl EdgeIntegral {
    pub(crate) fn new(grid: &BasinGrid) -> Self {
        let (w, h) = (grid.width(), grid.height());
        let horizontal = SummedArea::new(w.saturating_sub(1), h, |c, r| {
            (grid.get(c, r) != grid.get(c + 1, r)) as u32
        });
        let vertical = SummedArea::new(w, h.saturating_sub(1), |c, r| {
            (grid.get(c, r) != grid.get(c, r + 1)) as u32
        });
        EdgeIntegral { horizontal, vertical }
    }

    /// Whether the inclusive rectangle `[c0, c1] x [r0, r1]` is uncertain.
    #[inline]
    pub(crate) fn mixed(&self, c0: usize, c1: usize, r0: usize, r1: usize) -> bool {
        self.horizontal.sum(c0, c1, r0, r1 + 1) > 0 || self.vertical.sum(c0, c1 + 1, r0, r1) > 0
    }
}

/// Per-label summed-area tables; slot order follows the sorted distinct
/// label values (unresolved last, when present).
#[derive(Debug, Clone)]
pub(crate) struct LabelIntegral {
    slots: Vec<SummedArea>,
}

impl LabelIntegral {
    pub(crate) fn new(grid: &BasinGrid) -> Self {
        let counts = grid.label_counts();
        let slots = (0..=255u8)
            .filter(|&l| counts[l as usize] > 0)
            .map(|l| SummedArea::new(grid.width(), grid.height(), |c, r| (grid.get(c, r) == l) as u32))
            .collect();
        LabelIntegral { slots }
    }

    /// Pixel counts per slot in the `size` x `size` box at (`col`, `row`),
    /// written into `out` (cleared first).
    #[inline]
    pub(crate) fn box_counts(&self, col: usize, row: usize, size: usize, out: &mut Vec<u32>) {
        out.clear();
        out.extend(
            self.slots
                .iter()
                .map(|s| s.sum(col, col + size, row, row + size))
                .filter(|&n| n > 0),
        );
    }
}
