//! Parameter sweeps: plan -> basins -> tiles -> labels -> images + manifest.
//!
//! A plan is JSON:
//!
//! ```json
//! {
//!   "budgets": {"budget_scale": 0.1, "repeats": 10},
//!   "entries": [
//!     {"system": "duffing",
//!      "params": {"gamma": {"min": 0.1, "max": 0.5, "count": 2}, "omega": [0.2, 2.5]},
//!      "region": {"x_min": -2, "x_max": 2, "y_min": -2, "y_max": 2, "resolution": 1000},
//!      "integrator": {"transient_periods": 20}},
//!     {"system": "newton", "samples": 5,
//!      "params": {"a0": {"uniform": [0, 1]}, "a1": {"uniform": [0, 1]}, "a2": 0, "a3": 0,
//!                 "a4": 0, "a5": 1, "b_re": 1, "b_im": 0}}
//!   ]
//! }
//! ```
//!
//! Fixed parameters expand to their cartesian product (alphabetical by
//! name, first name varying slowest). Random parameters are drawn `samples`
//! times per fixed combination. `region` defaults to the system's standard
//! window; `integrator` keys override the per-system defaults.

use super::label::{label_basin, LabelBudgets};
use super::manifest::{read_manifest, write_manifest, ManifestRecord, Split};
use super::seed::derive_seed;
use super::tile::{tile_basin, SOURCE_SIZE};
use super::{split_for_system, write_basin_image, DatasetError};
use crate::grid::Region;
use crate::metrics::DEFAULT_REPEATS;
use crate::systems::{compute_basin, IntegratorConfig, SystemKind, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    Value(f64),
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
    Uniform { uniform: [f64; 2] },
}

impl ParamSpec {
    fn values(&self) -> Result<Vec<f64>, String> {
        match *self {
            ParamSpec::Value(v) => Ok(vec![v]),
            ParamSpec::List(ref v) if v.is_empty() => Err("empty list".into()),
            ParamSpec::List(ref v) => Ok(v.clone()),
            ParamSpec::Range { count: 0, .. } => Err("range count must be >= 1".into()),
            ParamSpec::Range { min, count: 1, .. } => Ok(vec![min]),
            ParamSpec::Range { min, max, count } => Ok((0..count)
                .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
                .collect()),
            ParamSpec::Uniform { .. } => unreachable!("random parameters are drawn, not listed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub budget_scale: f64,
    pub repeats: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { budget_scale: 1.0, repeats: DEFAULT_REPEATS }
    }
}

impl Budgets {
    fn label_budgets(&self) -> Result<LabelBudgets, String> {
        if !(self.budget_scale > 0.0 && self.budget_scale <= 1.0) {
            return Err(format!("budget_scale must be in (0, 1], got {}", self.budget_scale));
        }
        if self.repeats == 0 {
            return Err("repeats must be >= 1".into());
        }
        Ok(LabelBudgets { repeats: self.repeats, ..LabelBudgets::scaled(self.budget_scale) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub system: SystemKind,
    pub params: BTreeMap<String, ParamSpec>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub region: Option<Region>,
    #[serde(default)]
    pub integrator: Option<serde_json::Map<String, serde_json::Value>>,
    #[serde(default)]
    pub budgets: Option<Budgets>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    #[serde(default)]
    pub budgets: Budgets,
    pub entries: Vec<PlanEntry>,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        serde_json::from_str(text).map_err(|e| DatasetError::Plan(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub manifest_path: PathBuf,
    pub records: Vec<ManifestRecord>,
    /// Parameter points computed in this run.
    pub computed: usize,
    /// Parameter points whose records and images were already complete.
    pub reused: usize,
    /// Parameter points that failed and were skipped.
    pub failed: usize,
}

impl SweepSummary {
    pub fn split_counts(&self) -> Vec<(Split, usize)> {
        Split::ALL
            .into_iter()
            .map(|s| (s, self.records.iter().filter(|r| r.split == s).count()))
            .collect()
    }
}

/// One resolved entry: everything needed to run its points.
struct Job {
    kind: SystemKind,
    region: Region,
    config: IntegratorConfig,
    budgets: LabelBudgets,
    points: Vec<Vec<(String, f64)>>,
}

fn resolve(plan: &SweepPlan, base_seed: u64) -> Result<Vec<Job>, DatasetError> {
    plan.entries
        .iter()
        .enumerate()
        .map(|(i, e)| resolve_entry(e, i, plan, base_seed).map_err(|m| DatasetError::Plan(format!("entry {i}: {m}"))))
        .collect()
}

fn resolve_entry(e: &PlanEntry, index: usize, plan: &SweepPlan, base_seed: u64) -> Result<Job, String> {
    let region = match e.region {
        Some(r) => r,
        None => e.system.default_region(SOURCE_SIZE).map_err(|err| err.to_string())?,
    };
    region.validate().map_err(|err| err.to_string())?;
    if region.resolution != SOURCE_SIZE {
        return Err(format!("resolution must be {SOURCE_SIZE}, got {}", region.resolution));
    }

    let mut config = serde_json::to_value(IntegratorConfig::for_system(e.system)).expect("config serializes");
    if let Some(overrides) = &e.integrator {
        let obj = config.as_object_mut().expect("config is an object");
        for (k, v) in overrides {
            if !obj.contains_key(k) {
                return Err(format!("unknown integrator setting {k:?}"));
            }
            obj.insert(k.clone(), v.clone());
        }
    }
    let config: IntegratorConfig = serde_json::from_value(config).map_err(|err| err.to_string())?;
    config.validate().map_err(|err| err.to_string())?;

    let budgets = e.budgets.as_ref().unwrap_or(&plan.budgets).label_budgets()?;

    let (random, fixed): (Vec<_>, Vec<_>) =
        e.params.iter().partition(|(_, p)| matches!(p, ParamSpec::Uniform { .. }));
    let samples = match (e.samples, random.is_empty()) {
        (Some(0), _) => return Err("samples must be >= 1".into()),
        (Some(n), false) => n,
        (None, _) => 1,
        (Some(_), true) => return Err("samples needs at least one uniform parameter".into()),
    };
    let mut combos: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for (name, spec) in &fixed {
        let values = spec.values().map_err(|m| format!("{name}: {m}"))?;
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push(((*name).clone(), v));
                    c
                })
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index as u64);
    let mut points = Vec::with_capacity(combos.len() * samples);
    for combo in combos {
        for _ in 0..samples {
            let mut p = combo.clone();
            for (name, spec) in &random {
                let ParamSpec::Uniform { uniform: [lo, hi] } = spec else { unreachable!() };
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(format!("{name}: uniform bounds out of order"));
                }
                p.push(((*name).clone(), if lo == hi { *lo } else { rng.random_range(*lo..*hi) }));
            }
            // Canonical order, and an early check that the names fit the system.
            let spec = SystemSpec::from_params(e.system, &p).map_err(|err| err.to_string())?;
            points.push(spec.param_pairs());
        }
    }
    Ok(Job { kind: e.system, region, config, budgets, points })
}

fn image_name(kind: SystemKind, entry: usize, point: usize, tile: usize) -> String {
    format!("{kind}_{entry:03}_{point:05}_t{tile}.png")
}

/// Run `plan` into `out_dir`, using the current rayon pool for parallelism.
///
/// Records come out in plan order (entry, point, tile) whatever the pool
/// size. A point whose ten images and manifest rows already exist is reused
/// rather than recomputed. Points that fail are logged and skipped; only an
/// invalid plan or an unwritable output directory aborts the sweep.
pub fn run_sweep(plan: &SweepPlan, out_dir: &Path, base_seed: u64) -> Result<SweepSummary, DatasetError> {
    let jobs = resolve(plan, base_seed)?;
    std::fs::create_dir_all(out_dir).map_err(|e| DatasetError::io(out_dir, e))?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let mut existing: HashMap<String, ManifestRecord> = if manifest_path.exists() {
        read_manifest(&manifest_path)?.into_iter().map(|r| (r.path.clone(), r)).collect()
    } else {
        HashMap::new()
    };

    let total: usize = jobs.iter().map(|j| j.points.len()).sum();
    let mut summary = SweepSummary {
        manifest_path: manifest_path.clone(),
        records: Vec::new(),
        computed: 0,
        reused: 0,
        failed: 0,
    };
    let mut done = 0;
    for (entry, job) in jobs.iter().enumerate() {
        for (point, params) in job.points.iter().enumerate() {
            done += 1;
            let names: Vec<String> = (0..super::TILES_PER_BASIN)
                .map(|t| image_name(job.kind, entry, point, t))
                .collect();
            let complete = names.iter().all(|n| existing.contains_key(n) && out_dir.join(n).is_file());
            if complete {
                summary.records.extend(names.iter().map(|n| existing.remove(n).expect("checked above")));
                summary.reused += 1;
                log::info!("[{done}/{total}] {} point {point}: already complete", job.kind);
                continue;
            }
            match run_point(job, params, &names, out_dir, base_seed) {
                Ok(records) => {
                    summary.records.extend(records);
                    summary.computed += 1;
                    write_manifest(&summary.records, &manifest_path)?;
                    log::info!("[{done}/{total}] {} point {point}: done", job.kind);
                }
                Err(e @ DatasetError::Io { .. }) => return Err(e),
                Err(e) => {
                    summary.failed += 1;
                    log::warn!("[{done}/{total}] {} point {point} {params:?} skipped: {e}", job.kind);
                }
            }
        }
    }
    write_manifest(&summary.records, &manifest_path)?;
    Ok(summary)
}

fn run_point(
    job: &Job,
    params: &[(String, f64)],
    names: &[String],
    out_dir: &Path,
    base_seed: u64,
) -> Result<Vec<ManifestRecord>, DatasetError> {
    let spec = SystemSpec::from_params(job.kind, params)?;
    let basin = compute_basin(&spec, &job.region, &job.config)?;
    let tiles = tile_basin(&basin)?;
    tiles
        .par_iter()
        .enumerate()
        .map(|(t, tile)| {
            let seed = derive_seed(base_seed, job.kind, params, t);
            let labels = label_basin(tile, &job.budgets, seed);
            write_basin_image(tile, out_dir.join(&names[t]))?;
            let (fdim_mean, fdim_std) = split_result(&labels.fdim);
            let (sb_mean, sb_std) = split_result(&labels.sb);
            let (sbb_mean, sbb_std) = split_result(&labels.sbb);
            Ok(ManifestRecord {
                path: names[t].clone(),
                system: job.kind,
                params: params.to_vec(),
                tile_index: t,
                split: split_for_system(job.kind),
                fdim_mean,
                fdim_std,
                sb_mean,
                sb_std,
                sbb_mean,
                sbb_std,
                wada: labels.wada.verdict.is_wada(),
                num_labels: tile.num_labels(),
                seed,
            })
        })
        .collect()
}

fn split_result<E>(r: &Result<crate::metrics::MetricResult, E>) -> (Option<f64>, Option<f64>) {
    match r {
        Ok(m) => (Some(m.mean), Some(m.std)),
        Err(_) => (None, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(json: &str) -> SweepPlan {
        SweepPlan::from_json(json).unwrap()
    }

    #[test]
    fn cartesian_expansion_order() {
        let p = plan(r#"{"entries":[{"system":"duffing",
            "params":{"omega":[0.2,2.5],"gamma":{"min":0.1,"max":0.5,"count":2}}}]}"#);
        let jobs = resolve(&p, 0).unwrap();
        let pts: Vec<(f64, f64)> = jobs[0].points.iter().map(|v| (v[0].1, v[1].1)).collect();
        assert_eq!(pts, vec![(0.1, 0.2), (0.1, 2.5), (0.5, 0.2), (0.5, 2.5)]);
        assert_eq!(jobs[0].region.resolution, 1000);
    }

    #[test]
    fn random_params_are_seeded() {
        let text = r#"{"entries":[{"system":"newton","samples":3,"params":{
            "a0":{"uniform":[0,1]},"a1":0,"a2":0,"a3":0,"a4":0,"a5":1,"b_re":1,"b_im":0}}]}"#;
        let a = resolve(&plan(text), 5).unwrap();
        let b = resolve(&plan(text), 5).unwrap();
        let c = resolve(&plan(text), 6).unwrap();
        assert_eq!(a[0].points.len(), 3);
        assert_eq!(a[0].points, b[0].points);
        assert_ne!(a[0].points, c[0].points);
        for p in &a[0].points {
            assert_eq!(p[0].0, "a0");
            assert!((0.0..1.0).contains(&p[0].1));
        }
    }

    #[test]
    fn plan_errors() {
        let bad = [
            r#"{"entries":[{"system":"duffing","params":{"gamma":0.3}}]}"#,
            r#"{"entries":[{"system":"duffing","params":{"gamma":0.3,"omega":1,"zeta":2}}]}"#,
            r#"{"entries":[{"system":"duffing","params":{"gamma":0.3,"omega":1},
                "region":{"x_min":-1,"x_max":1,"y_min":-1,"y_max":1,"resolution":333}}]}"#,
            r#"{"entries":[{"system":"duffing","params":{"gamma":0.3,"omega":1},
                "integrator":{"warp":9}}]}"#,
            r#"{"budgets":{"budget_scale":2},"entries":[{"system":"duffing","params":{"gamma":0.3,"omega":1}}]}"#,
            r#"{"entries":[{"system":"duffing","samples":2,"params":{"gamma":0.3,"omega":1}}]}"#,
        ];
        for text in bad {
            assert!(matches!(resolve(&plan(text), 0), Err(DatasetError::Plan(_))), "{text}");
        }
        assert!(SweepPlan::from_json(r#"{"entries":[{"system":"lorenz","params":{}}]}"#).is_err());
    }

    #[test]
    fn integrator_overrides_merge_onto_system_defaults() {
        let p = plan(r#"{"entries":[{"system":"henon_heiles","params":{"E":0.25},
            "integrator":{"t_max":50}}]}"#);
        let job = &resolve(&p, 0).unwrap()[0];
        assert_eq!(job.config.t_max, 50.0);
        assert_eq!(job.config.dt, 0.005);
    }
}
