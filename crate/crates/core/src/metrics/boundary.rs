//! Pixel boundaries, Chebyshev dilation and basin merging.

use super::MetricError;
use crate::grid::{BasinGrid, UNRESOLVED};

/// Boolean image with the same shape as a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask size");
        Mask { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pixels set here but not in `other`.
    pub fn count_outside(&self, other: &Mask) -> usize {
        self.bits.iter().zip(&other.bits).filter(|&(&a, &b)| a && !b).count()
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.count_outside(other) == 0
    }
}

/// A pixel is on the boundary iff one of its 4-neighbors carries a
/// different label.
pub fn boundary_mask(grid: &BasinGrid) -> Mask {
    let (w, h) = (grid.width(), grid.height());
    let mut bits = vec![false; w * h];
    for r in 0..h {
        for c in 0..w {
            let l = grid.get(c, r);
            if c + 1 < w && grid.get(c + 1, r) != l {
                bits[r * w + c] = true;
                bits[r * w + c + 1] = true;
            }
            if r + 1 < h && grid.get(c, r + 1) != l {
                bits[r * w + c] = true;
                bits[(r + 1) * w + c] = true;
            }
        }
    }
    Mask::new(w, h, bits)
}

/// Dilation by the Chebyshev ball of radius `r`: an output pixel is set iff
/// some input pixel within `max(|dx|, |dy|) <= r` is set.
pub fn fatten(mask: &Mask, r: usize) -> Mask {
    if r == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width, mask.height);
    // Separable: sliding-window OR along rows, then along columns.
    let mut rows = vec![false; w * h];
    for y in 0..h {
        dilate_line(&mask.bits[y * w..(y + 1) * w], r, &mut rows[y * w..(y + 1) * w]);
    }
    let mut out = vec![false; w * h];
    let mut column = vec![false; h];
    let mut dilated = vec![false; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        dilate_line(&column, r, &mut dilated);
        for y in 0..h {
            out[y * w + x] = dilated[y];
        }
    }
    Mask::new(w, h, out)
}

fn dilate_line(input: &[bool], r: usize, out: &mut [bool]) {
    let n = input.len();
    let mut prefix = vec![0u32; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + input[i] as u32;
    }
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(r);
        let hi = (i + r + 1).min(n);
        *o = prefix[hi] > prefix[lo];
    }
}

/// Relabel every pixel of basin `label_b` as `label_a`.
pub fn merge_labels(grid: &BasinGrid, label_a: u8, label_b: u8) -> Result<BasinGrid, MetricError> {
    let counts = grid.label_counts();
    for l in [label_a, label_b] {
        if l == UNRESOLVED || counts[l as usize] == 0 {
            return Err(MetricError::LabelNotFound(l));
        }
    }
    if label_a == label_b {
        return Err(MetricError::InvalidConfig(format!("cannot merge label {label_a} with itself")));
    }
    let labels = grid
        .labels()
        .iter()
        .map(|&l| if l == label_b { label_a } else { l })
        .collect();
    Ok(grid.with_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_mask(&BasinGrid::uniform(5, 4, 2).unwrap()).count(), 0);

        let split = BasinGrid::from_fn(10, 6, |c, _| (c >= 4) as u8).unwrap();
        let m = boundary_mask(&split);
        assert_eq!(m.count(), 12);
        for r in 0..6 {
            assert!(m.get(3, r) && m.get(4, r));
        }

        let checker = BasinGrid::from_fn(7, 7, |c, r| ((c + r) % 2) as u8).unwrap();
        assert_eq!(boundary_mask(&checker).count(), 49);
    }

    #[test]
    fn fatten_examples() {
        let mut bits = vec![false; 49];
        bits[3 * 7 + 3] = true;
        let m = Mask::new(7, 7, bits);
        assert_eq!(fatten(&m, 0), m);
        let f = fatten(&m, 1);
        assert_eq!(f.count(), 9);
        for r in 2..=4 {
            for c in 2..=4 {
                assert!(f.get(c, r));
            }
        }

        let mut line = vec![false; 20 * 20];
        for r in 0..20 {
            line[r * 20 + 10] = true;
        }
        let band = fatten(&Mask::new(20, 20, line.clone()), 5);
        assert_eq!(band.count(), 11 * 20);
        // Clipped at the edge.
        let mut edge = vec![false; 20 * 20];
        for r in 0..20 {
            edge[r * 20 + 1] = true;
        }
        assert_eq!(fatten(&Mask::new(20, 20, edge), 5).count(), 7 * 20);
    }

    #[test]
    fn merge_examples() {
        let g = BasinGrid::new(3, 1, vec![0, 1, 2]).unwrap();
        let m = merge_labels(&g, 0, 1).unwrap();
        assert_eq!(m.labels(), &[0, 0, 2]);
        assert_eq!(m.num_labels(), 2);
        assert_eq!(merge_labels(&g, 0, 7), Err(MetricError::LabelNotFound(7)));

        let stripes = BasinGrid::from_fn(8, 4, |c, _| (c >= 4) as u8).unwrap();
        assert_eq!(boundary_mask(&merge_labels(&stripes, 0, 1).unwrap()).count(), 0);

        let three = BasinGrid::from_fn(9, 9, |c, r| ((c / 3 + r / 3) % 3) as u8).unwrap();
        assert_eq!(
            boundary_mask(&merge_labels(&three, 0, 2).unwrap()),
            boundary_mask(&merge_labels(&three, 2, 0).unwrap())
        );
    }
}
