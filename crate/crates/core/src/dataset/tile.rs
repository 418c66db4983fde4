//! 1000x1000 -> nine 333x333 crops plus one strided downsample.

use super::DatasetError;
use crate::grid::{BasinGrid, Region};

pub const SOURCE_SIZE: usize = 1000;
pub const TILE_SIZE: usize = 333;
pub const TILES_PER_BASIN: usize = 10;
/// Index of the downsampled full-view tile.
pub const DOWNSAMPLE_TILE: usize = 9;

const STRIDE: usize = SOURCE_SIZE / TILE_SIZE;

/// Tiles 0..=8 are the row-major 333x333 blocks at offsets {0, 333, 666};
/// the last row and column of the source are dropped. Tile 9 keeps every
/// third pixel starting at (0, 0).
///
/// If the source carries a region, each tile gets the sub-region whose
/// pixel centers coincide with the source pixels it copied.
pub fn tile_basin(grid: &BasinGrid) -> Result<Vec<BasinGrid>, DatasetError> {
    if grid.width() != SOURCE_SIZE || grid.height() != SOURCE_SIZE {
        return Err(DatasetError::SizeMismatch {
            expected: SOURCE_SIZE,
            width: grid.width(),
            height: grid.height(),
        });
    }
    let mut tiles = Vec::with_capacity(TILES_PER_BASIN);
    for ty in 0..STRIDE {
        for tx in 0..STRIDE {
            let (col, row) = (tx * TILE_SIZE, ty * TILE_SIZE);
            let mut tile = grid.crop(col, row, TILE_SIZE, TILE_SIZE)?;
            if let Some(r) = grid.region() {
                tile = tile.with_region(sub_region(r, col as f64, row as f64, 1.0));
            }
            tiles.push(tile);
        }
    }
    let mut down = BasinGrid::from_fn(TILE_SIZE, TILE_SIZE, |c, r| grid.get(STRIDE * c, STRIDE * r))?;
    if let Some(r) = grid.region() {
        // Shift by one source pixel so the coarse centers land on the
        // sampled source centers.
        down = down.with_region(sub_region(r, -1.0, -1.0, STRIDE as f64));
    }
    tiles.push(down);
    Ok(tiles)
}

fn sub_region(r: &Region, col: f64, row: f64, scale: f64) -> Region {
    let (dx, dy) = (r.dx(), r.dy());
    let x_min = r.x_min + col * dx;
    let y_min = r.y_min + row * dy;
    Region {
        x_min,
        x_max: x_min + TILE_SIZE as f64 * scale * dx,
        y_min,
        y_max: y_min + TILE_SIZE as f64 * scale * dy,
        resolution: TILE_SIZE,
    }
}
