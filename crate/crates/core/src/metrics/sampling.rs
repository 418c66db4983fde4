use super::MetricError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Box draws per independent RNG stream.
pub const CHUNK_BOXES: usize = 8192;

/// Generator for chunk `stream` of an estimator seeded with `seed`.
pub fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sizes of the chunks covering a budget of `n` draws.
pub(crate) fn chunk_sizes(n: usize) -> impl Iterator<Item = (u64, usize)> {
    (0..n.div_ceil(CHUNK_BOXES)).map(move |c| (c as u64, CHUNK_BOXES.min(n - c * CHUNK_BOXES)))
}

/// Top-left corner of a `box_size` square placed uniformly so that it lies
/// fully inside a `width` x `height` grid.
pub fn sample_box<R: Rng + ?Sized>(
    rng: &mut R,
    box_size: usize,
    width: usize,
    height: usize,
) -> Result<(usize, usize), MetricError> {
    if box_size == 0 || box_size > width || box_size > height {
        return Err(MetricError::BoxTooLarge { box_size, width, height });
    }
    let col = rng.random_range(0..=width - box_size);
    let row = rng.random_range(0..=height - box_size);
    Ok((col, row))
}

/// First and last cell (inclusive, clipped) along one axis of length `len`
/// covered by a box of side `side` whose center sits in half-pixel slot
/// `slot` (slot `h` spans `[h/2, (h+1)/2)` in pixel units, `0 <= h < 2 len`).
///
/// An interval of integer length `side` placed at a generic position
/// overlaps `side + 1` pixel cells.
#[inline]
pub(crate) fn centered_span(slot: usize, side: usize, len: usize) -> (usize, usize) {
    let slot = slot as i64;
    let side_i = side as i64;
    let start = if side.is_multiple_of(2) {
        slot / 2 - side_i / 2
    } else {
        (slot + 1) / 2 - (side_i + 1) / 2
    };
    let end = start + side_i;
    (start.max(0) as usize, end.min(len as i64 - 1) as usize)
}

/// Box of side `side` with its center uniform over the continuous extent
/// of the grid, clipped to the grid. Returns inclusive cell bounds
/// `(col0, col1, row0, row1)`.
pub fn sample_centered_box<R: Rng + ?Sized>(
    rng: &mut R,
    side: usize,
    width: usize,
    height: usize,
) -> (usize, usize, usize, usize) {
    let hx = rng.random_range(0..2 * width);
    let hy = rng.random_range(0..2 * height);
    let (c0, c1) = centered_span(hx, side, width);
    let (r0, r1) = centered_span(hy, side, height);
    (c0, c1, r0, r1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_size_box_has_one_position() {
        let mut rng = chunk_rng(7, 0);
        for _ in 0..100 {
            assert_eq!(sample_box(&mut rng, 10, 10, 10).unwrap(), (0, 0));
        }
        assert!(matches!(
            sample_box(&mut rng, 11, 10, 20),
            Err(MetricError::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn draws_are_reproducible_and_streams_differ() {
        let draw = |seed, stream| {
            let mut rng = chunk_rng(seed, stream);
            (0..50).map(|_| sample_box(&mut rng, 15, 333, 333).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(1, 0), draw(1, 0));
        assert_ne!(draw(1, 0), draw(1, 1));
        assert_ne!(draw(1, 0), draw(2, 0));
    }

    #[test]
    fn corners_are_uniform_chi_square() {
        // 319 corner values per axis, 1e5 draws, binned into 29 groups of 11.
        let mut rng = chunk_rng(12345, 0);
        let mut bins_x = [0u64; 29];
        let mut bins_y = [0u64; 29];
        for _ in 0..100_000 {
            let (c, r) = sample_box(&mut rng, 15, 333, 333).unwrap();
            assert!(c <= 318 && r <= 318);
            bins_x[c / 11] += 1;
            bins_y[r / 11] += 1;
        }
        let expected = 100_000.0 / 29.0;
        for bins in [bins_x, bins_y] {
            let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
            // 28 degrees of freedom: the 99.9% quantile is 56.9.
            assert!(chi2 < 56.9, "chi2 = {chi2}");
        }
    }

    #[test]
    fn centered_spans_cover_side_plus_one_cells() {
        let len = 50;
        for side in [3usize, 4, 9, 12] {
            for slot in 0..2 * len {
                let (a, b) = centered_span(slot, side, len);
                assert!(a <= b && b < len);
                let cx = slot as f64 / 2.0 + 0.25;
                let lo = (cx - side as f64 / 2.0).floor().max(0.0) as usize;
                let hi = ((cx + side as f64 / 2.0).floor() as usize).min(len - 1);
                assert_eq!((a, b), (lo, hi), "side {side} slot {slot}");
            }
        }
    }

    #[test]
    fn chunking_covers_budget() {
        let sizes: Vec<_> = chunk_sizes(CHUNK_BOXES * 2 + 5).collect();
        assert_eq!(sizes, vec![(0, CHUNK_BOXES), (1, CHUNK_BOXES), (2, 5)]);
        assert_eq!(chunk_sizes(0).count(), 0);
    }
}
