//! Magnetic pendulum over `n` magnets equally spaced on a circle.
//!
//! `x'' + b x' + 0.2 x - sum_i (x_i - x) / D_i^3 = 0` (same for y) with
//! `D_i^2 = (x_i - x)^2 + (y_i - y)^2 + 0.2^2`.

use super::rk4::rk4_step_unchecked;
use super::{IntegratorConfig, SystemError};
use crate::grid::UNRESOLVED;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Height of the bob above the magnet plane.
pub const PENDULUM_HEIGHT: f64 = 0.2;
/// Restoring (gravity) coefficient.
pub const SPRING_CONSTANT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticPendulumParams {
    /// Linear drag `b`.
    #[serde(rename = "b")]
    pub damping: f64,
    /// Distance `a` of each magnet from the center.
    #[serde(rename = "a")]
    pub magnet_radius: f64,
    #[serde(rename = "n")]
    pub n_magnets: usize,
}

impl MagneticPendulumParams {
    pub fn validate(&self) -> Result<(), SystemError> {
        if !(2..=4).contains(&self.n_magnets) {
            return Err(SystemError::InvalidParams(format!(
                "n_magnets must be 2, 3 or 4, got {}",
                self.n_magnets
            )));
        }
        if !(self.magnet_radius.is_finite() && self.magnet_radius > 0.0) {
            return Err(SystemError::InvalidParams("magnet radius must be positive".into()));
        }
        if !self.damping.is_finite() {
            return Err(SystemError::InvalidParams("damping must be finite".into()));
        }
        Ok(())
    }
}

/// Magnet `i` sits at angle `2πi/n` on the circle of radius `a`.
pub fn magnet_positions(params: &MagneticPendulumParams) -> Vec<[f64; 2]> {
    (0..params.n_magnets)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / params.n_magnets as f64).sin_cos();
            [params.magnet_radius * c, params.magnet_radius * s]
        })
        .collect()
}

/// `[x, y, vx, vy]`
pub type MagnetState = [f64; 4];

#[derive(Debug, Clone)]
pub struct MagneticPendulum {
    damping: f64,
    magnets: Vec<[f64; 2]>,
}

impl MagneticPendulum {
    pub fn new(params: &MagneticPendulumParams) -> Result<Self, SystemError> {
        params.validate()?;
        Ok(MagneticPendulum { damping: params.damping, magnets: magnet_positions(params) })
    }

    pub fn magnets(&self) -> &[[f64; 2]] {
        &self.magnets
    }

    #[inline]
    pub fn derivative(&self, s: &MagnetState) -> MagnetState {
        let [x, y, vx, vy] = *s;
        let mut ax = -self.damping * vx - SPRING_CONSTANT * x;
        let mut ay = -self.damping * vy - SPRING_CONSTANT * y;
        let h2 = PENDULUM_HEIGHT * PENDULUM_HEIGHT;
        for m in &self.magnets {
            let dx = m[0] - x;
            let dy = m[1] - y;
            let d2 = dx * dx + dy * dy + h2;
            let inv_d3 = 1.0 / (d2 * d2.sqrt());
            ax += dx * inv_d3;
            ay += dy * inv_d3;
        }
        [vx, vy, ax, ay]
    }

    fn nearest_magnet(&self, x: f64, y: f64) -> (usize, f64) {
        self.magnets
            .iter()
            .enumerate()
            .map(|(i, m)| (i, (m[0] - x).hypot(m[1] - y)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least two magnets")
    }
}

/// Integrate until the bob has rested (speed below `stop_speed`, within
/// `match_tol` of one magnet) for `dwell_time`; label by that magnet.
pub fn classify_magnetic(
    state0: &MagnetState,
    system: &MagneticPendulum,
    config: &IntegratorConfig,
) -> u8 {
    let dt = config.dt;
    let dwell_steps = (config.dwell_time / dt).ceil().max(1.0) as u64;
    let max_steps = (config.t_max / dt).ceil() as u64;
    let deriv = |_t: f64, s: &MagnetState| system.derivative(s);
    let mut state = *state0;
    let mut dwell = 0u64;
    let mut resting_at = usize::MAX;
    for k in 0..max_steps {
        let speed = state[2].hypot(state[3]);
        let (magnet, dist) = system.nearest_magnet(state[0], state[1]);
        if speed < config.stop_speed && dist <= config.match_tol {
            if magnet == resting_at {
                dwell += 1;
            } else {
                resting_at = magnet;
                dwell = 1;
            }
            if dwell >= dwell_steps {
                return magnet as u8;
            }
        } else {
            dwell = 0;
            resting_at = usize::MAX;
        }
        state = rk4_step_unchecked(&state, k as f64 * dt, dt, &deriv);
        if !state.iter().all(|v| v.is_finite()) {
            return UNRESOLVED;
        }
    }
    UNRESOLVED
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> MagneticPendulumParams {
        MagneticPendulumParams { damping: 0.2, magnet_radius: 2.0, n_magnets: n }
    }

    #[test]
    fn magnets_on_circle() {
        let m = magnet_positions(&params(4));
        assert_eq!(m.len(), 4);
        assert!((m[1][0]).abs() < 1e-12 && (m[1][1] - 2.0).abs() < 1e-12);
        for p in &m {
            assert!((p[0].hypot(p[1]) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn starting_at_a_magnet_labels_it() {
        let sys = MagneticPendulum::new(&params(3)).unwrap();
        let cfg = IntegratorConfig::default();
        for (i, m) in sys.magnets().to_vec().iter().enumerate() {
            assert_eq!(classify_magnetic(&[m[0], m[1], 0.0, 0.0], &sys, &cfg), i as u8);
        }
    }

    #[test]
    fn bisector_start_is_contained() {
        let sys = MagneticPendulum::new(&params(2)).unwrap();
        let cfg = IntegratorConfig { t_max: 500.0, ..IntegratorConfig::default() };
        let label = classify_magnetic(&[0.0, 1.0, 0.0, 0.0], &sys, &cfg);
        assert!(label == 0 || label == 1 || label == UNRESOLVED);
    }

    #[test]
    fn invalid_magnet_count() {
        assert!(MagneticPendulum::new(&params(5)).is_err());
        assert!(MagneticPendulum::new(&params(1)).is_err());
    }
}
