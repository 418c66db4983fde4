//! Basin images: lossless 8-bit grayscale PNG, pixel value = label id,
//! unresolved = 255. The phase-space region rides along in a text chunk.

use super::DatasetError;
use crate::grid::{BasinGrid, Region};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

const REGION_KEY: &str = "basinlab-region";

pub fn write_basin_image(grid: &BasinGrid, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
    let encode_err = |e: png::EncodingError| DatasetError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut encoder = png::Encoder::new(BufWriter::new(file), grid.width() as u32, grid.height() as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    if let Some(region) = grid.region() {
        let text = serde_json::to_string(region).expect("region serializes");
        encoder.add_text_chunk(REGION_KEY.into(), text).map_err(encode_err)?;
    }
    let mut writer = encoder.write_header().map_err(encode_err)?;
    writer.write_image_data(grid.labels()).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}

pub fn read_basin_image(path: impl AsRef<Path>) -> Result<BasinGrid, DatasetError> {
    let path = path.as_ref();
    let bad = |message: String| DatasetError::Image { path: path.to_path_buf(), message };
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    let mut reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| bad(e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(bad(format!(
            "expected 8-bit grayscale, got {:?} at {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let region = match info.uncompressed_latin1_text.iter().find(|t| t.keyword == REGION_KEY) {
        Some(chunk) => Some(
            serde_json::from_str::<Region>(&chunk.text)
                .map_err(|e| bad(format!("bad region chunk: {e}")))?,
        ),
        None => None,
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| bad("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| bad(e.to_string()))?;
    buf.truncate(frame.buffer_size());
    let grid = BasinGrid::new(frame.width as usize, frame.height as usize, buf)?;
    Ok(match region {
        Some(r) => grid.with_region(r),
        None => grid,
    })
}
