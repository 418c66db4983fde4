//! The five dynamical systems and basin generation.
//!
//! Every pixel of a [`Region`] is an initial condition; its trajectory is
//! integrated with fixed-step RK4 (or iterated, for the Newton map) and
//! classified by asymptotic fate. Labels in the returned grid follow
//! row-major first-occurrence order.

mod driven;
mod henon_heiles;
mod magnetic;
mod newton;
mod registry;
mod rk4;

pub use driven::{
    classify_driven, driven_fingerprint, DrivenSystem, Duffing, DuffingParams, ForcedPendulum,
    PendulumParams, DUFFING_DAMPING, PENDULUM_DAMPING,
};
pub use henon_heiles::{
    classify_escape, hh_energy, hh_initial_state, hh_potential, HenonHeilesParams, HhState,
    ESCAPE_ENERGY,
};
pub use magnetic::{
    classify_magnetic, magnet_positions, MagneticPendulum, MagneticPendulumParams, MagnetState,
    PENDULUM_HEIGHT, SPRING_CONSTANT,
};
pub use newton::{
    classify_newton, eval_poly, polynomial_roots, NewtonMap, NewtonOutcome, NewtonParams,
};
pub use registry::{AttractorRegistry, Signature};
pub use rk4::rk4_step;

use crate::grid::{BasinGrid, GridError, Region, UNRESOLVED};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error("numerical blow-up at t = {t}")]
    NumericalBlowup { t: f64 },
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("initial position lies in the energetically forbidden region (V = {potential} >= E = {energy})")]
    ForbiddenRegion { potential: f64, energy: f64 },
    #[error("tangential direction undefined at the origin")]
    UndefinedTangent,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Which of the five systems a basin comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Duffing,
    Pendulum,
    HenonHeiles,
    Newton,
    MagneticPendulum,
}

impl SystemKind {
    pub const ALL: [SystemKind; 5] = [
        SystemKind::Duffing,
        SystemKind::Pendulum,
        SystemKind::HenonHeiles,
        SystemKind::Newton,
        SystemKind::MagneticPendulum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Duffing => "duffing",
            SystemKind::Pendulum => "pendulum",
            SystemKind::HenonHeiles => "henon_heiles",
            SystemKind::Newton => "newton",
            SystemKind::MagneticPendulum => "magnetic_pendulum",
        }
    }

    pub fn parse(s: &str) -> Option<SystemKind> {
        SystemKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Phase-space window used when none is given.
    pub fn default_region(self, resolution: usize) -> Result<Region, GridError> {
        use std::f64::consts::PI;
        match self {
            SystemKind::Duffing => Region::centered(2.0, resolution),
            SystemKind::Pendulum => Region::new(-PI, PI, -4.0, 4.0, resolution),
            // Fully inside the allowed region for E >= 0.25.
            SystemKind::HenonHeiles => Region::centered(0.4, resolution),
            SystemKind::Newton => Region::centered(2.5, resolution),
            SystemKind::MagneticPendulum => Region::centered(3.0, resolution),
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One dynamical system together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum SystemSpec {
    Duffing(DuffingParams),
    Pendulum(PendulumParams),
    HenonHeiles(HenonHeilesParams),
    Newton(NewtonParams),
    MagneticPendulum(MagneticPendulumParams),
}

impl SystemSpec {
    pub fn kind(&self) -> SystemKind {
        match self {
            SystemSpec::Duffing(_) => SystemKind::Duffing,
            SystemSpec::Pendulum(_) => SystemKind::Pendulum,
            SystemSpec::HenonHeiles(_) => SystemKind::HenonHeiles,
            SystemSpec::Newton(_) => SystemKind::Newton,
            SystemSpec::MagneticPendulum(_) => SystemKind::MagneticPendulum,
        }
    }

    /// Parameters as ordered `(name, value)` pairs, for manifests and seeds.
    pub fn param_pairs(&self) -> Vec<(String, f64)> {
        match self {
            SystemSpec::Duffing(p) => vec![("gamma".into(), p.gamma), ("omega".into(), p.omega)],
            SystemSpec::Pendulum(p) => vec![("F".into(), p.forcing), ("omega".into(), p.omega)],
            SystemSpec::HenonHeiles(p) => vec![("E".into(), p.energy)],
            SystemSpec::Newton(p) => {
                let mut v: Vec<(String, f64)> = p
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| (format!("a{i}"), a))
                    .collect();
                v.push(("b_re".into(), p.b[0]));
                v.push(("b_im".into(), p.b[1]));
                v
            }
            SystemSpec::MagneticPendulum(p) => vec![
                ("b".into(), p.damping),
                ("a".into(), p.magnet_radius),
                ("n".into(), p.n_magnets as f64),
            ],
        }
    }

    /// Inverse of [`SystemSpec::param_pairs`]. Newton coefficients are
    /// `a0..aN` with no gaps.
    pub fn from_params(kind: SystemKind, params: &[(String, f64)]) -> Result<Self, SystemError> {
        let get = |name: &str| {
            params
                .iter()
                .find(|(k, _)| k == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| SystemError::InvalidParams(format!("{kind} needs parameter {name}")))
        };
        let expected: Vec<String> = match kind {
            SystemKind::Duffing => vec!["gamma".into(), "omega".into()],
            SystemKind::Pendulum => vec!["F".into(), "omega".into()],
            SystemKind::HenonHeiles => vec!["E".into()],
            SystemKind::MagneticPendulum => vec!["b".into(), "a".into(), "n".into()],
            SystemKind::Newton => {
                let degree = params
                    .iter()
                    .filter_map(|(k, _)| k.strip_prefix('a')?.parse::<usize>().ok())
                    .max()
                    .ok_or_else(|| SystemError::InvalidParams("newton needs a0..aN".into()))?;
                let mut v: Vec<String> = (0..=degree).map(|i| format!("a{i}")).collect();
                v.extend(["b_re".into(), "b_im".into()]);
                v
            }
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !expected.contains(k)) {
            return Err(SystemError::InvalidParams(format!("unknown {kind} parameter {k}")));
        }
        let spec = match kind {
            SystemKind::Duffing => {
                SystemSpec::Duffing(DuffingParams { gamma: get("gamma")?, omega: get("omega")? })
            }
            SystemKind::Pendulum => {
                SystemSpec::Pendulum(PendulumParams { forcing: get("F")?, omega: get("omega")? })
            }
            SystemKind::HenonHeiles => SystemSpec::HenonHeiles(HenonHeilesParams { energy: get("E")? }),
            SystemKind::MagneticPendulum => {
                let n = get("n")?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(SystemError::InvalidParams(format!("n must be an integer, got {n}")));
                }
                SystemSpec::MagneticPendulum(MagneticPendulumParams {
                    damping: get("b")?,
                    magnet_radius: get("a")?,
                    n_magnets: n as usize,
                })
            }
            SystemKind::Newton => {
                let coeffs = expected[..expected.len() - 2]
                    .iter()
                    .map(|k| get(k))
                    .collect::<Result<Vec<_>, _>>()?;
                SystemSpec::Newton(NewtonParams { coeffs, b: [get("b_re")?, get("b_im")?] })
            }
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SystemError::InvalidParams(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            SystemSpec::Duffing(p) => {
                if !p.gamma.is_finite() || p.gamma < 0.0 {
                    return Err(SystemError::InvalidParams(format!(
                        "gamma must be non-negative, got {}",
                        p.gamma
                    )));
                }
                positive("omega", p.omega)
            }
            SystemSpec::Pendulum(p) => {
                if !p.forcing.is_finite() {
                    return Err(SystemError::InvalidParams("F must be finite".into()));
                }
                positive("omega", p.omega)
            }
            SystemSpec::HenonHeiles(p) => {
                if p.energy.is_finite() {
                    Ok(())
                } else {
                    Err(SystemError::InvalidParams("E must be finite".into()))
                }
            }
            SystemSpec::Newton(p) => p.validate(),
            SystemSpec::MagneticPendulum(p) => p.validate(),
        }
    }
}

/// Integration and classification settings.
///
/// Driven systems use `steps_per_period` and `transient_periods`;
/// autonomous ones use `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps_per_period: u32,
    pub transient_periods: u32,
    pub snapshot_count: usize,
    /// Tolerance for recognizing a stroboscopic cycle. Much tighter than
    /// `match_tol`: chaotic orbits shadow unstable cycles for a few periods.
    pub cycle_tol: f64,
    /// Stroboscopic samples collected before a non-periodic trajectory is
    /// fingerprinted by its footprint instead of a cycle.
    pub max_snapshots: usize,
    /// Side of the coarse cells used for non-periodic footprints.
    pub cell_size: f64,
    pub match_tol: f64,
    pub stop_speed: f64,
    pub dwell_time: f64,
    pub escape_radius: f64,
    pub t_max: f64,
    pub newton_max_iter: u32,
    pub newton_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.01,
            steps_per_period: 200,
            transient_periods: 50,
            snapshot_count: 8,
            cycle_tol: 1e-4,
            max_snapshots: 200,
            cell_size: 0.2,
            match_tol: 0.05,
            stop_speed: 1e-3,
            dwell_time: 1.0,
            escape_radius: 3.0,
            t_max: 1e4,
            newton_max_iter: 200,
            newton_tol: 1e-9,
        }
    }
}

impl IntegratorConfig {
    /// Defaults with the per-system step size.
    pub fn for_system(kind: SystemKind) -> Self {
        let dt = match kind {
            SystemKind::HenonHeiles => 0.005,
            _ => 0.01,
        };
        IntegratorConfig { dt, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        let checks: [(&str, f64); 10] = [
            ("dt", self.dt),
            ("cycle_tol", self.cycle_tol),
            ("cell_size", self.cell_size),
            ("match_tol", self.match_tol),
            ("stop_speed", self.stop_speed),
            ("dwell_time", self.dwell_time),
            ("escape_radius", self.escape_radius),
            ("t_max", self.t_max),
            ("newton_tol", self.newton_tol),
            ("steps_per_period", self.steps_per_period as f64),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(SystemError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.snapshot_count < 2 {
            return Err(SystemError::InvalidConfig("snapshot_count must be >= 2".into()));
        }
        if self.max_snapshots < self.snapshot_count {
            return Err(SystemError::InvalidConfig(
                "max_snapshots must be >= snapshot_count".into(),
            ));
        }
        if self.newton_max_iter == 0 {
            return Err(SystemError::InvalidConfig("newton_max_iter must be >= 1".into()));
        }
        if self.transient_periods == 0 {
            return Err(SystemError::InvalidConfig("transient_periods must be >= 1".into()));
        }
        Ok(())
    }

    /// Transient duration for a driven system with forcing frequency `omega`.
    pub fn t_transient(&self, omega: f64) -> f64 {
        self.transient_periods as f64 * std::f64::consts::TAU / omega
    }
}

/// Rows classified per parallel batch for driven systems; the registry
/// merge runs between batches.
const DRIVEN_BATCH_ROWS: usize = 8;

/// Compute the basin of `system` over `region`.
///
/// Pixel (col, row) starts at the cell center given by
/// [`Region::pixel_center`]. Pixels that fail to classify get
/// [`UNRESOLVED`]; only whole-grid failures (bad config, unsolvable
/// polynomial) are returned as errors. The result does not depend on the
/// size of the rayon pool it runs in.
pub fn compute_basin(
    system: &SystemSpec,
    region: &Region,
    config: &IntegratorConfig,
) -> Result<BasinGrid, SystemError> {
    region.validate()?;
    config.validate()?;
    system.validate()?;
    let n = region.resolution;
    let labels = match system {
        SystemSpec::Duffing(p) => driven_basin(&Duffing::new(*p), region, config),
        SystemSpec::Pendulum(p) => driven_basin(&ForcedPendulum::new(*p), region, config),
        SystemSpec::Newton(p) => {
            let map = NewtonMap::new(p)?;
            par_pixels(region, |x, y| {
                classify_newton(num_complex::Complex64::new(x, y), &map, config).label
            })
        }
        SystemSpec::HenonHeiles(p) => par_pixels(region, |x, y| {
            match hh_initial_state(x, y, p.energy) {
                Ok(state) => classify_escape(&state, config),
                Err(_) => UNRESOLVED,
            }
        }),
        SystemSpec::MagneticPendulum(p) => {
            let system = MagneticPendulum::new(p)?;
            par_pixels(region, |x, y| classify_magnetic(&[x, y, 0.0, 0.0], &system, config))
        }
    };
    let grid = BasinGrid::new(n, n, labels)?.with_region(*region);
    Ok(grid.compact_first_occurrence().0)
}

fn par_pixels<F>(region: &Region, f: F) -> Vec<u8>
where
    F: Fn(f64, f64) -> u8 + Sync,
{
    let n = region.resolution;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = region.pixel_center(idx % n, idx / n);
            f(x, y)
        })
        .collect()
}

fn driven_basin<S: DrivenSystem + Sync>(
    system: &S,
    region: &Region,
    config: &IntegratorConfig,
) -> Vec<u8> {
    let n = region.resolution;
    let mut registry = AttractorRegistry::new(config.match_tol, system.is_angular());
    let mut labels = Vec::with_capacity(n * n);
    for first_row in (0..n).step_by(DRIVEN_BATCH_ROWS) {
        let last_row = (first_row + DRIVEN_BATCH_ROWS).min(n);
        let starts: Vec<[f64; 2]> = (first_row * n..last_row * n)
            .map(|idx| {
                let (x, v) = region.pixel_center(idx % n, idx / n);
                [x, v]
            })
            .collect();
        let batches: Vec<Vec<Option<Signature>>> = starts
            .par_chunks(driven::LANES)
            .map(|c| driven::fingerprint_batch(system, c, config))
            .collect();
        let signatures: Vec<Option<Signature>> = batches.into_iter().flatten().collect();
        labels.extend(signatures.iter().map(|s| match s {
            Some(sig) => registry.classify(sig),
            None => UNRESOLVED,
        }));
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_spec_json_shape() {
        let s = SystemSpec::Duffing(DuffingParams { gamma: 0.3, omega: 1.0 });
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"system":"duffing","gamma":0.3,"omega":1.0}"#);
        let back: SystemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn params_roundtrip() {
        let specs = [
            SystemSpec::Duffing(DuffingParams { gamma: 0.3, omega: 1.0 }),
            SystemSpec::Pendulum(PendulumParams { forcing: 1.5, omega: 0.5 }),
            SystemSpec::HenonHeiles(HenonHeilesParams { energy: 0.25 }),
            SystemSpec::Newton(NewtonParams { coeffs: vec![-1.0, 0.0, 0.0, 1.0], b: [1.0, 0.2] }),
            SystemSpec::MagneticPendulum(MagneticPendulumParams {
                damping: 0.2,
                magnet_radius: 2.0,
                n_magnets: 4,
            }),
        ];
        for s in specs {
            assert_eq!(SystemSpec::from_params(s.kind(), &s.param_pairs()).unwrap(), s);
        }
        let missing = [("gamma".to_string(), 0.3)];
        assert!(SystemSpec::from_params(SystemKind::Duffing, &missing).is_err());
        let extra = [("E".to_string(), 0.3), ("x".to_string(), 1.0)];
        assert!(SystemSpec::from_params(SystemKind::HenonHeiles, &extra).is_err());
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in SystemKind::ALL {
            assert_eq!(SystemKind::parse(k.name()), Some(k));
        }
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig { dt: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { max_snapshots: 4, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn newton_quadratic_basin_splits_half_planes() {
        let spec = SystemSpec::Newton(NewtonParams { coeffs: vec![-1.0, 0.0, 1.0], b: [1.0, 0.0] });
        let region = Region::centered(2.0, 20).unwrap();
        let grid = compute_basin(&spec, &region, &IntegratorConfig::default()).unwrap();
        // Left half converges to -1, right half to +1; first pixel is on the left.
        for row in 0..20 {
            for col in 0..20 {
                let expected = if col < 10 { 0 } else { 1 };
                assert_eq!(grid.get(col, row), expected, "pixel ({col},{row})");
            }
        }
        assert_eq!(grid.region(), Some(&region));
    }
}
