//! Periodically forced one-degree-of-freedom systems: the double-well
//! Duffing oscillator and the forced damped pendulum.
//!
//! Classification samples the flow stroboscopically (once per forcing
//! period) after a transient. A trajectory whose last `snapshot_count`
//! samples repeat (within `cycle_tol`) with some period
//! p <= snapshot_count / 2 is on a cycle;
//! one that never does within `max_snapshots` samples is fingerprinted by
//! the coarse cells it visits.

use super::registry::{wrap_angle, AttractorRegistry, Signature};
use super::IntegratorConfig;
use crate::grid::UNRESOLVED;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub const DUFFING_DAMPING: f64 = 0.15;
pub const PENDULUM_DAMPING: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuffingParams {
    pub gamma: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    #[serde(rename = "F")]
    pub forcing: f64,
    pub omega: f64,
}

/// Second-order system `x'' = f(x, x') + forcing(t)` with forcing
/// frequency `omega`.
pub trait DrivenSystem {
    fn omega(&self) -> f64;
    /// Time-dependent forcing term.
    fn forcing(&self, t: f64) -> f64;
    /// Phase-space velocity given the current forcing value.
    fn field(&self, s: &[f64; 2], forcing: f64) -> [f64; 2];
    /// Whether the position coordinate is an angle.
    fn is_angular(&self) -> bool;

    fn derivative(&self, t: f64, s: &[f64; 2]) -> [f64; 2] {
        self.field(s, self.forcing(t))
    }
}

/// `x'' + 0.15 x' - x + x^3 = gamma cos(omega t)`.
#[derive(Debug, Clone, Copy)]
pub struct Duffing {
    pub params: DuffingParams,
}

impl Duffing {
    pub fn new(params: DuffingParams) -> Self {
        Duffing { params }
    }
}

impl DrivenSystem for Duffing {
    fn omega(&self) -> f64 {
        self.params.omega
    }

    fn forcing(&self, t: f64) -> f64 {
        self.params.gamma * (self.params.omega * t).cos()
    }

    #[inline]
    fn field(&self, s: &[f64; 2], forcing: f64) -> [f64; 2] {
        let [x, v] = *s;
        [v, -DUFFING_DAMPING * v + x - x * x * x + forcing]
    }

    fn is_angular(&self) -> bool {
        false
    }
}

/// `theta'' + 0.2 theta' + sin(theta) = F sin(omega t)`.
#[derive(Debug, Clone, Copy)]
pub struct ForcedPendulum {
    pub params: PendulumParams,
}

impl ForcedPendulum {
    pub fn new(params: PendulumParams) -> Self {
        ForcedPendulum { params }
    }
}

impl DrivenSystem for ForcedPendulum {
    fn omega(&self) -> f64 {
        self.params.omega
    }

    fn forcing(&self, t: f64) -> f64 {
        self.params.forcing * (self.params.omega * t).sin()
    }

    #[inline]
    fn field(&self, s: &[f64; 2], forcing: f64) -> [f64; 2] {
        let [theta, w] = *s;
        [w, -PENDULUM_DAMPING * w - theta.sin() + forcing]
    }

    fn is_angular(&self) -> bool {
        true
    }
}

/// Trajectories integrated in lockstep. The RK4 update is latency-bound;
/// independent lanes let the CPU overlap them. Each lane performs exactly
/// the arithmetic of a lone trajectory, so results do not depend on how
/// starts are grouped.
pub(crate) const LANES: usize = 8;

/// Integrate from `state0` and fingerprint the attractor reached.
/// `None` means the trajectory blew up or ran past `t_max`.
pub fn driven_fingerprint<S: DrivenSystem>(
    system: &S,
    state0: [f64; 2],
    config: &IntegratorConfig,
) -> Option<Signature> {
    fingerprint_batch(system, &[state0], config).pop().flatten()
}

/// [`driven_fingerprint`] for up to [`LANES`] starts at once.
pub(crate) fn fingerprint_batch<S: DrivenSystem>(
    system: &S,
    starts: &[[f64; 2]],
    config: &IntegratorConfig,
) -> Vec<Option<Signature>> {
    let n = starts.len();
    assert!((1..=LANES).contains(&n), "batch of {n} starts");
    let period = TAU / system.omega();
    let steps = config.steps_per_period as usize;
    let dt = period / steps as f64;
    // Every period starts at an exact multiple of the forcing period, so the
    // forcing at the RK4 stage times (whole and half steps) repeats exactly.
    let table: Vec<f64> = (0..=2 * steps).map(|j| system.forcing(j as f64 * 0.5 * dt)).collect();

    let mut s = [starts[0]; LANES];
    s[..n].copy_from_slice(starts);
    let mut done: [Option<Option<Signature>>; LANES] = Default::default();
    for d in done.iter_mut().skip(n) {
        *d = Some(None);
    }
    let mut samples: [Vec<[f64; 2]>; LANES] = Default::default();

    let wrap = |p: [f64; 2]| {
        if system.is_angular() {
            [wrap_angle(p[0]), p[1]]
        } else {
            p
        }
    };
    let metric = AttractorRegistry::new(config.match_tol, system.is_angular());
    let m = config.snapshot_count;
    let transient = config.transient_periods as usize;

    for n_periods in 1.. {
        if n_periods as f64 * period > config.t_max {
            break;
        }
        for k in 0..steps {
            let (f0, fh, f1) = (table[2 * k], table[2 * k + 1], table[2 * k + 2]);
            for x in s.iter_mut() {
                let k1 = system.field(x, f0);
                let k2 = system.field(&[x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]], fh);
                let k3 = system.field(&[x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]], fh);
                let k4 = system.field(&[x[0] + dt * k3[0], x[1] + dt * k3[1]], f1);
                for i in 0..2 {
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        for lane in 0..LANES {
            if done[lane].is_some() {
                continue;
            }
            if !s[lane].iter().all(|v| v.is_finite()) {
                done[lane] = Some(None);
                continue;
            }
            if n_periods <= transient {
                continue;
            }
            let samples = &mut samples[lane];
            samples.push(wrap(s[lane]));
            if samples.len() >= m {
                let window = &samples[samples.len() - m..];
                if let Some(p) = cycle_period(window, |a, b| metric.distance(a, b), config.cycle_tol) {
                    done[lane] = Some(Some(Signature::Periodic(window[m - p..].to_vec())));
                    continue;
                }
            }
            if samples.len() >= config.max_snapshots {
                done[lane] = Some(Some(footprint(samples, config.cell_size)));
            }
        }
        if done.iter().all(|d| d.is_some()) {
            break;
        }
    }
    // Lanes still running hit t_max.
    done.into_iter().take(n).map(|d| d.flatten()).collect()
}

fn footprint(samples: &[[f64; 2]], cell: f64) -> Signature {
    let mut cells: Vec<(i64, i64)> = samples
        .iter()
        .map(|p| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    Signature::Footprint(cells)
}

/// Smallest p <= len/2 with window[i] ~ window[i + p] for all i.
fn cycle_period<D>(window: &[[f64; 2]], dist: D, tol: f64) -> Option<usize>
where
    D: Fn(&[f64; 2], &[f64; 2]) -> f64,
{
    let m = window.len();
    (1..=m / 2).find(|&p| (0..m - p).all(|i| dist(&window[i], &window[i + p]) < tol))
}

/// Classify one initial condition against (and into) `registry`.
pub fn classify_driven<S: DrivenSystem>(
    system: &S,
    state0: [f64; 2],
    registry: &mut AttractorRegistry,
    config: &IntegratorConfig,
) -> u8 {
    match driven_fingerprint(system, state0, config) {
        Some(sig) => registry.classify(&sig),
        None => UNRESOLVED,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn unforced_duffing_wells_are_distinct_attractors() {
        let sys = Duffing::new(DuffingParams { gamma: 0.0, omega: 1.0 });
        let mut reg = AttractorRegistry::new(0.05, false);
        let right = classify_driven(&sys, [1.0, 0.0], &mut reg, &cfg());
        let left = classify_driven(&sys, [-1.0, 0.0], &mut reg, &cfg());
        assert_eq!(right, 0);
        assert_eq!(left, 1);
        match driven_fingerprint(&sys, [1.0, 0.0], &cfg()).unwrap() {
            Signature::Periodic(points) => {
                assert_eq!(points.len(), 1);
                assert!((points[0][0] - 1.0).abs() < 1e-6);
            }
            other => panic!("expected a fixed point, got {other:?}"),
        }
        // Nearby start in the right well lands on the same sink.
        assert_eq!(classify_driven(&sys, [1.2, 0.1], &mut reg, &cfg()), 0);
    }

    #[test]
    fn same_limit_cycle_from_different_starts() {
        let sys = Duffing::new(DuffingParams { gamma: 0.3, omega: 1.0 });
        // Both starts were checked to reach the large period-1 orbit.
        let a = driven_fingerprint(&sys, [0.0, 1.6], &cfg()).unwrap();
        let b = driven_fingerprint(&sys, [0.2, 1.5], &cfg()).unwrap();
        match &a {
            // Fixed point of the stroboscopic map, located independently with
            // plain RK4 at the same step size.
            Signature::Periodic(p) => {
                assert_eq!(p.len(), 1);
                assert!((p[0][0] - 0.638_755_727).abs() < 1e-6, "{p:?}");
                assert!((p[0][1] - 1.341_598_698).abs() < 1e-6, "{p:?}");
            }
            other => panic!("expected a period-1 orbit, got {other:?}"),
        }
        let mut reg = AttractorRegistry::new(0.05, false);
        assert_eq!(reg.classify(&a), reg.classify(&b));
    }

    #[test]
    fn pendulum_rest_state_is_periodic_modulo_two_pi() {
        let sys = ForcedPendulum::new(PendulumParams { forcing: 0.0, omega: 1.0 });
        let mut reg = AttractorRegistry::new(0.05, true);
        let a = classify_driven(&sys, [0.1, 0.0], &mut reg, &cfg());
        let b = classify_driven(&sys, [TAU + 0.1, 0.0], &mut reg, &cfg());
        assert_eq!(a, b);
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn t_max_cap_gives_unresolved() {
        let sys = Duffing::new(DuffingParams { gamma: 0.0, omega: 1.0 });
        let short = IntegratorConfig { t_max: 10.0, ..cfg() };
        let mut reg = AttractorRegistry::new(0.05, false);
        assert_eq!(classify_driven(&sys, [1.0, 0.0], &mut reg, &short), UNRESOLVED);
    }

    #[test]
    fn batching_does_not_change_results() {
        let sys = Duffing::new(DuffingParams { gamma: 0.3, omega: 1.0 });
        let starts = [[0.0, 1.6], [-1.3, 0.4], [1e300, 1e300], [0.7, -0.9], [0.1, 0.1]];
        let batch = fingerprint_batch(&sys, &starts, &cfg());
        for (s, b) in starts.iter().zip(&batch) {
            assert_eq!(&driven_fingerprint(&sys, *s, &cfg()), b);
        }
        assert_eq!(batch[2], None);
    }

    #[test]
    fn cycle_detection() {
        let d = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let w = [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]];
        assert_eq!(cycle_period(&w, d, 0.01), Some(2));
        let w = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert_eq!(cycle_period(&w, d, 0.01), None);
    }
}
