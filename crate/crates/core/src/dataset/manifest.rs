//! The CSV manifest shared with the training side.
//!
//! Columns, in order: `path, system, params, tile_index, split, fdim_mean,
//! fdim_std, sb_mean, sb_std, sbb_mean, sbb_std, wada, num_labels, seed`.
//! `params` is `name=value` pairs joined by `;`. Reals are written with 17
//! significant digits; an empty field means the metric errored.

use super::DatasetError;
use crate::systems::SystemKind;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

pub const MANIFEST_HEADER: [&str; 14] = [
    "path",
    "system",
    "params",
    "tile_index",
    "split",
    "fdim_mean",
    "fdim_std",
    "sb_mean",
    "sb_std",
    "sbb_mean",
    "sbb_std",
    "wada",
    "num_labels",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRecord {
    /// Image path, relative to the manifest's directory.
    pub path: String,
    pub system: SystemKind,
    pub params: Vec<(String, f64)>,
    pub tile_index: usize,
    pub split: Split,
    pub fdim_mean: Option<f64>,
    pub fdim_std: Option<f64>,
    pub sb_mean: Option<f64>,
    pub sb_std: Option<f64>,
    pub sbb_mean: Option<f64>,
    pub sbb_std: Option<f64>,
    pub wada: bool,
    pub num_labels: usize,
    pub seed: u64,
}

impl ManifestRecord {
    fn to_fields(&self) -> Vec<String> {
        let real = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v:.16e}"))
            .collect::<Vec<_>>()
            .join(";");
        vec![
            self.path.clone(),
            self.system.name().to_string(),
            params,
            self.tile_index.to_string(),
            self.split.as_str().to_string(),
            real(self.fdim_mean),
            real(self.fdim_std),
            real(self.sb_mean),
            real(self.sb_std),
            real(self.sbb_mean),
            real(self.sbb_std),
            self.wada.to_string(),
            self.num_labels.to_string(),
            self.seed.to_string(),
        ]
    }

    fn from_fields(fields: &csv::StringRecord) -> Result<Self, String> {
        if fields.len() != MANIFEST_HEADER.len() {
            return Err(format!("expected {} fields, got {}", MANIFEST_HEADER.len(), fields.len()));
        }
        let f = |i: usize| &fields[i];
        let real = |i: usize| -> Result<Option<f64>, String> {
            match f(i) {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| format!("{}: not a number: {s:?}", MANIFEST_HEADER[i])),
            }
        };
        let int = |i: usize| -> Result<u64, String> {
            f(i).parse()
                .map_err(|_| format!("{}: not an integer: {:?}", MANIFEST_HEADER[i], f(i)))
        };
        let params = if f(2).is_empty() {
            Vec::new()
        } else {
            f(2).split(';')
                .map(|kv| {
                    let (k, v) = kv.split_once('=').ok_or_else(|| format!("params: bad pair {kv:?}"))?;
                    let v: f64 = v.parse().map_err(|_| format!("params: bad value in {kv:?}"))?;
                    Ok((k.to_string(), v))
                })
                .collect::<Result<Vec<_>, String>>()?
        };
        Ok(ManifestRecord {
            path: f(0).to_string(),
            system: SystemKind::parse(f(1)).ok_or_else(|| format!("unknown system {:?}", f(1)))?,
            params,
            tile_index: int(3)? as usize,
            split: Split::parse(f(4)).ok_or_else(|| format!("unknown split {:?}", f(4)))?,
            fdim_mean: real(5)?,
            fdim_std: real(6)?,
            sb_mean: real(7)?,
            sb_std: real(8)?,
            sbb_mean: real(9)?,
            sbb_std: real(10)?,
            wada: f(11).parse().map_err(|_| format!("wada: not a boolean: {:?}", f(11)))?,
            num_labels: int(12)? as usize,
            seed: int(13)?,
        })
    }
}

pub fn write_manifest_to<W: Write>(records: &[ManifestRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MANIFEST_HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest_from<R: Read>(input: R) -> Result<Vec<ManifestRecord>, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = Vec::new();
    let mut header_seen = false;
    for row in rdr.records() {
        let row = row.map_err(|e| DatasetError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if !header_seen {
            if row.iter().ne(MANIFEST_HEADER.iter().copied()) {
                return Err(DatasetError::Parse { line, message: "unexpected header".into() });
            }
            header_seen = true;
            continue;
        }
        records.push(ManifestRecord::from_fields(&row).map_err(|message| DatasetError::Parse { line, message })?);
    }
    if !header_seen {
        return Err(DatasetError::Parse { line: 1, message: "missing header".into() });
    }
    Ok(records)
}

/// Write atomically: a temporary sibling is renamed over `path`.
pub fn write_manifest(records: &[ManifestRecord], path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let tmp = path.with_extension("csv.tmp");
    let file = std::fs::File::create(&tmp).map_err(|e| DatasetError::io(&tmp, e))?;
    write_manifest_to(records, std::io::BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => DatasetError::io(&tmp, io),
        other => DatasetError::io(&tmp, std::io::Error::other(format!("{other:?}"))),
    })?;
    std::fs::rename(&tmp, path).map_err(|e| DatasetError::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DatasetError::io(path, e))?;
    read_manifest_from(std::io::BufReader::new(file))
}
