//! Fixed-bin histograms of manifest labels, per split, in long CSV format:
//!
//! ```text
//! split,metric,bin,lower,upper,count
//! train,fdim,0,1.000,1.025,3
//! train,wada,false,,,7
//! ```
//!
//! FDim bins cover [1, 2] and Sb/Sbb bins cover [0, ln 5], all 0.025 wide
//! (the last Sb/Sbb bin is cut at ln 5). Values outside a range are counted
//! in the nearest end bin. Errored metrics are not counted. Splits with no
//! records produce no rows.

use super::manifest::{ManifestRecord, Split};
use std::io::Write;

pub const HISTOGRAM_HEADER: [&str; 6] = ["split", "metric", "bin", "lower", "upper", "count"];

const BIN_WIDTH: f64 = 0.025;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub split: Split,
    pub metric: &'static str,
    /// `(bin name, lower, upper, count)`; bounds are `None` for Wada.
    pub bins: Vec<(String, Option<f64>, Option<f64>, usize)>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.3).sum()
    }
}

fn real_histogram(
    split: Split,
    metric: &'static str,
    lo: f64,
    hi: f64,
    values: impl Iterator<Item = f64>,
) -> Histogram {
    let n = ((hi - lo) / BIN_WIDTH - 1e-9).ceil() as usize;
    let mut counts = vec![0usize; n];
    for v in values {
        // The nudge keeps values sitting on an edge (0.3 / 0.025 = 11.999...)
        // in the bin that edge opens.
        let i = ((v - lo) / BIN_WIDTH + 1e-9).floor();
        let i = if i.is_nan() || i < 0.0 { 0 } else { (i as usize).min(n - 1) };
        counts[i] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let lower = lo + i as f64 * BIN_WIDTH;
            let upper = (lo + (i + 1) as f64 * BIN_WIDTH).min(hi);
            (i.to_string(), Some(lower), Some(upper), c)
        })
        .collect();
    Histogram { split, metric, bins }
}

/// One histogram per (split present in `records`, metric), splits in
/// train/validation/test order and metrics in fdim/sb/sbb/wada order.
pub fn histograms(records: &[ManifestRecord]) -> Vec<Histogram> {
    let ln5 = 5f64.ln();
    let mut out = Vec::new();
    for split in Split::ALL {
        let rs: Vec<&ManifestRecord> = records.iter().filter(|r| r.split == split).collect();
        if rs.is_empty() {
            continue;
        }
        out.push(real_histogram(split, "fdim", 1.0, 2.0, rs.iter().filter_map(|r| r.fdim_mean)));
        out.push(real_histogram(split, "sb", 0.0, ln5, rs.iter().filter_map(|r| r.sb_mean)));
        out.push(real_histogram(split, "sbb", 0.0, ln5, rs.iter().filter_map(|r| r.sbb_mean)));
        let wada = rs.iter().filter(|r| r.wada).count();
        out.push(Histogram {
            split,
            metric: "wada",
            bins: vec![
                ("false".into(), None, None, rs.len() - wada),
                ("true".into(), None, None, wada),
            ],
        });
    }
    out
}

pub fn write_histograms<W: Write>(hists: &[Histogram], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HISTOGRAM_HEADER)?;
    let bound = |b: Option<f64>| b.map(|x| format!("{x:.6}")).unwrap_or_default();
    for h in hists {
        for (name, lower, upper, count) in &h.bins {
            w.write_record([
                h.split.as_str(),
                h.metric,
                name,
                &bound(*lower),
                &bound(*upper),
                &count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemKind;

    fn rec(split: Split, fdim: Option<f64>, sb: f64, wada: bool) -> ManifestRecord {
        ManifestRecord {
            path: "x.png".into(),
            system: SystemKind::Duffing,
            params: vec![],
            tile_index: 0,
            split,
            fdim_mean: fdim,
            fdim_std: fdim.map(|_| 0.0),
            sb_mean: Some(sb),
            sb_std: Some(0.0),
            sbb_mean: Some(sb + 0.1),
            sbb_std: Some(0.0),
            wada,
            num_labels: 2,
            seed: 0,
        }
    }

    #[test]
    fn bin_layout() {
        let h = histograms(&[rec(Split::Train, Some(1.5), 0.3, false)]);
        assert_eq!(h.len(), 4);
        assert_eq!(h[0].bins.len(), 40);
        assert_eq!(h[1].bins.len(), 65);
        let last = h[1].bins.last().unwrap();
        assert!((last.1.unwrap() - 1.6).abs() < 1e-12);
        assert!((last.2.unwrap() - 5f64.ln()).abs() < 1e-12);
        assert_eq!(h[0].bins[20].3, 1);
        assert_eq!(h[1].bins[12].3, 1);
    }

    #[test]
    fn counts_sum_to_records_with_values() {
        let rs: Vec<_> = (0..10)
            .map(|i| rec(Split::Train, (i % 3 != 0).then_some(1.0 + i as f64 / 10.0), 0.1 * i as f64, i < 4))
            .collect();
        let h = histograms(&rs);
        assert_eq!(h[0].total(), rs.iter().filter(|r| r.fdim_mean.is_some()).count());
        assert_eq!(h[1].total(), 10);
        assert_eq!(h[3].bins[1].3, 4);
        assert_eq!(h[3].bins[0].3, 6);
    }

    #[test]
    fn out_of_range_values_clamp_to_end_bins() {
        let h = histograms(&[
            rec(Split::Test, Some(0.9), -0.1, false),
            rec(Split::Test, Some(2.0), 9.0, false),
        ]);
        assert_eq!(h[0].bins[0].3, 1);
        assert_eq!(h[0].bins[39].3, 1);
        assert_eq!(h[1].bins[0].3, 1);
        assert_eq!(h[1].bins[64].3, 1);
    }

    #[test]
    fn empty_manifest_is_header_only() {
        let mut buf = Vec::new();
        write_histograms(&histograms(&[]), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "split,metric,bin,lower,upper,count\n");
    }

    #[test]
    fn mixed_splits_group_in_order() {
        let h = histograms(&[
            rec(Split::Test, Some(1.2), 0.1, true),
            rec(Split::Train, Some(1.2), 0.1, true),
            rec(Split::Validation, Some(1.2), 0.1, true),
        ]);
        let splits: Vec<Split> = h.iter().map(|x| x.split).collect();
        assert_eq!(splits[0], Split::Train);
        assert_eq!(splits[4], Split::Validation);
        assert_eq!(splits[8], Split::Test);
    }
}
