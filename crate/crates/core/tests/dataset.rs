use basinlab::dataset::{
    histograms, read_basin_image, read_manifest, run_sweep, tile_basin, write_basin_image,
    write_histograms, write_manifest, DatasetError, ManifestRecord, Split, SweepPlan,
    DOWNSAMPLE_TILE, HISTOGRAM_HEADER, MANIFEST_HEADER, TILES_PER_BASIN, TILE_SIZE,
};
use basinlab::systems::SystemKind;
use basinlab::{BasinGrid, Region, UNRESOLVED};

fn source() -> BasinGrid {
    // Every pixel's label encodes its position modulo 250.
    BasinGrid::from_fn(1000, 1000, |c, r| ((c * 31 + r * 17) % 250) as u8)
        .unwrap()
        .with_region(Region::new(-1.0, 3.0, 0.0, 2.0, 1000).unwrap())
}

#[test]
fn tiles_copy_the_right_pixels() {
    let src = source();
    let tiles = tile_basin(&src).unwrap();
    assert_eq!(tiles.len(), TILES_PER_BASIN);
    for (i, tile) in tiles.iter().enumerate() {
        assert_eq!((tile.width(), tile.height()), (TILE_SIZE, TILE_SIZE));
        let (src_col, src_row, stride) = if i == DOWNSAMPLE_TILE {
            (0, 0, 3)
        } else {
            (i % 3 * TILE_SIZE, i / 3 * TILE_SIZE, 1)
        };
        for &(c, r) in &[(0, 0), (332, 0), (0, 332), (100, 250), (332, 332)] {
            assert_eq!(tile.get(c, r), src.get(src_col + stride * c, src_row + stride * r), "tile {i}");
        }
    }
}

#[test]
fn tile_regions_keep_pixel_centres() {
    let src = source();
    let outer = *src.region().unwrap();
    for (i, tile) in tile_basin(&src).unwrap().iter().enumerate() {
        let region = tile.region().unwrap();
        let (src_col, src_row, stride) = if i == DOWNSAMPLE_TILE {
            (0, 0, 3)
        } else {
            (i % 3 * TILE_SIZE, i / 3 * TILE_SIZE, 1)
        };
        for &(c, r) in &[(0, 0), (200, 17), (332, 332)] {
            let (x, y) = region.pixel_center(c, r);
            let (sx, sy) = outer.pixel_center(src_col + stride * c, src_row + stride * r);
            assert!((x - sx).abs() < 1e-12 && (y - sy).abs() < 1e-12, "tile {i} ({c}, {r})");
        }
    }
}

#[test]
fn tiling_needs_a_1000_grid() {
    let grid = BasinGrid::uniform(999, 1000, 0).unwrap();
    assert!(matches!(tile_basin(&grid), Err(DatasetError::SizeMismatch { .. })));
}

#[test]
fn png_roundtrip_keeps_labels_and_region() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.png");
    let grid = BasinGrid::from_fn(37, 21, |c, r| if (c + r) % 9 == 0 { UNRESOLVED } else { ((c * r) % 5) as u8 })
        .unwrap()
        .with_region(Region::new(-0.5, 1.25, 2.0, 3.0, 37).unwrap());
    write_basin_image(&grid, &path).unwrap();
    assert_eq!(read_basin_image(&path).unwrap(), grid);

    let bare = BasinGrid::uniform(4, 4, 1).unwrap();
    write_basin_image(&bare, &path).unwrap();
    assert_eq!(read_basin_image(&path).unwrap(), bare);
}

#[test]
fn missing_image_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_basin_image(dir.path().join("nope.png")), Err(DatasetError::Io { .. })));
}

fn record(i: usize) -> ManifestRecord {
    ManifestRecord {
        path: format!("newton_000_{i:05}_t0.png"),
        system: SystemKind::Newton,
        params: vec![("a0".into(), -1.0 / 3.0), ("b_re".into(), 0.1 * i as f64)],
        tile_index: i % 10,
        split: Split::ALL[i % 3],
        fdim_mean: Some(1.0 + 0.1 * i as f64),
        fdim_std: Some(1e-3),
        sb_mean: if i == 2 { None } else { Some(0.3) },
        sb_std: if i == 2 { None } else { Some(2e-4) },
        sbb_mean: Some(std::f64::consts::LN_2),
        sbb_std: Some(0.0),
        wada: i.is_multiple_of(2),
        num_labels: 3,
        seed: u64::MAX - i as u64,
    }
}

#[test]
fn manifest_roundtrip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.csv");
    let records: Vec<_> = (0..5).map(record).collect();
    write_manifest(&records, &path).unwrap();
    assert_eq!(read_manifest(&path).unwrap(), records);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), MANIFEST_HEADER.join(","));
}

#[test]
fn malformed_manifest_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.csv");
    write_manifest(&[record(0), record(1)], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap().replace(",train,", ",holdout,");
    std::fs::write(&path, text).unwrap();
    match read_manifest(&path) {
        Err(DatasetError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn histograms_count_every_record() {
    let records: Vec<_> = (0..9).map(record).collect();
    let hists = histograms(&records);
    let mut out = Vec::new();
    write_histograms(&hists, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().next().unwrap(), HISTOGRAM_HEADER.join(","));
    for split in Split::ALL {
        let n = records.iter().filter(|r| r.split == split).count();
        for metric in ["fdim", "wada"] {
            let total: usize = text
                .lines()
                .skip(1)
                .filter(|l| l.starts_with(&format!("{},{metric},", split.as_str())))
                .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
                .sum();
            assert_eq!(total, n, "{split:?} {metric}");
        }
    }
}

const PLAN: &str = r#"{
  "budgets": {"budget_scale": 0.01, "repeats": 2},
  "entries": [{
    "system": "newton",
    "params": {
      "a0": -1.0, "a1": 0.0, "a2": 0.0, "a3": 1.0,
      "b_re": [0.6, 1.0],
      "b_im": {"min": 0.0, "max": 0.2, "count": 2}
    },
    "region": {"x_min": -2.0, "x_max": 2.0, "y_min": -2.0, "y_max": 2.0, "resolution": 1000}
  }]
}"#;

#[test]
fn sweep_writes_records_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let plan = SweepPlan::from_json(PLAN).unwrap();
    let first = run_sweep(&plan, dir.path(), 5).unwrap();
    assert_eq!((first.computed, first.reused, first.failed), (4, 0, 0));
    assert_eq!(first.records.len(), 4 * TILES_PER_BASIN);
    assert_eq!(first.split_counts(), vec![(Split::Train, 40), (Split::Validation, 0), (Split::Test, 0)]);
    for r in &first.records {
        let img = read_basin_image(dir.path().join(&r.path)).unwrap();
        assert_eq!(img.num_labels(), r.num_labels);
        assert_eq!(img.width(), TILE_SIZE);
    }
    let manifest = std::fs::read(&first.manifest_path).unwrap();
    assert_eq!(read_manifest(&first.manifest_path).unwrap(), first.records);

    let again = run_sweep(&plan, dir.path(), 5).unwrap();
    assert_eq!((again.computed, again.reused), (0, 4));
    assert_eq!(std::fs::read(&again.manifest_path).unwrap(), manifest);

    // A lost image forces that point, and only that point, to be recomputed.
    std::fs::remove_file(dir.path().join(&first.records[13].path)).unwrap();
    let repaired = run_sweep(&plan, dir.path(), 5).unwrap();
    assert_eq!((repaired.computed, repaired.reused), (1, 3));
    assert_eq!(std::fs::read(&repaired.manifest_path).unwrap(), manifest);
}

#[test]
fn plans_reject_unknown_fields() {
    assert!(SweepPlan::from_json(r#"{"entries": [], "extra": 1}"#).is_err());
    let bad = PLAN.replace("\"region\"", "\"regoin\"");
    assert!(SweepPlan::from_json(&bad).is_err());
}
