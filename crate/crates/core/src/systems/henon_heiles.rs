//! Hénon-Heiles exit basins.
//!
//! `H = (px^2 + py^2)/2 + (x^2 + y^2)/2 + x^2 y - y^3/3`. Above the saddle
//! energy 1/6 the potential well opens through three exits at 90°, 210° and
//! 330°; a trajectory is labeled by the exit it leaves through.

use super::rk4::rk4_step_unchecked;
use super::{IntegratorConfig, SystemError};
use crate::grid::UNRESOLVED;
use serde::{Deserialize, Serialize};

/// Energy of the three saddles.
pub const ESCAPE_ENERGY: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HenonHeilesParams {
    #[serde(rename = "E")]
    pub energy: f64,
}

/// `[x, y, px, py]`
pub type HhState = [f64; 4];

#[inline]
pub fn hh_potential(x: f64, y: f64) -> f64 {
    0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0
}

pub fn hh_energy(s: &HhState) -> f64 {
    0.5 * (s[2] * s[2] + s[3] * s[3]) + hh_potential(s[0], s[1])
}

#[inline]
fn hh_derivative(_t: f64, s: &HhState) -> HhState {
    let [x, y, px, py] = *s;
    [px, py, -x - 2.0 * x * y, -y - x * x + y * y]
}

/// Tangential shooting: momentum of magnitude `sqrt(2 (E - V))`,
/// perpendicular to the position vector, pointing counterclockwise.
pub fn hh_initial_state(x: f64, y: f64, energy: f64) -> Result<HhState, SystemError> {
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(SystemError::UndefinedTangent);
    }
    let potential = hh_potential(x, y);
    if potential >= energy {
        return Err(SystemError::ForbiddenRegion { potential, energy });
    }
    let p = (2.0 * (energy - potential)).sqrt();
    Ok([x, y, -p * y / r, p * x / r])
}

/// Exit index from the polar angle of the escape point: sector k is the
/// 120° wedge centered on 90° + 120° k.
fn exit_sector(x: f64, y: f64) -> u8 {
    let deg = y.atan2(x).to_degrees().rem_euclid(360.0);
    // Shift so sector 0 starts at 0: 30°..150° -> 0..120.
    let shifted = (deg - 30.0).rem_euclid(360.0);
    ((shifted / 120.0) as u8).min(2)
}

/// Integrate until the orbit leaves the disk of radius `escape_radius` and
/// return its exit; a bounded orbit at `t_max` is [`UNRESOLVED`].
pub fn classify_escape(state0: &HhState, config: &IntegratorConfig) -> u8 {
    let radius = config.escape_radius;
    let r0 = state0[0].hypot(state0[1]);
    if r0 > radius {
        return exit_sector(state0[0], state0[1]);
    }
    let dt = config.dt;
    let max_steps = (config.t_max / dt).ceil() as u64;
    let mut state = *state0;
    let mut r_prev = r0;
    for k in 0..max_steps {
        let next = rk4_step_unchecked(&state, k as f64 * dt, dt, &hh_derivative);
        if !next.iter().all(|v| v.is_finite()) {
            return UNRESOLVED;
        }
        let r = next[0].hypot(next[1]);
        if r > radius {
            // Linear interpolation of the crossing between the two steps.
            let s = (radius - r_prev) / (r - r_prev);
            let x = state[0] + s * (next[0] - state[0]);
            let y = state[1] + s * (next[1] - state[1]);
            return exit_sector(x, y);
        }
        state = next;
        r_prev = r;
    }
    UNRESOLVED
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangential_shooting_along_plus_y() {
        let s = hh_initial_state(0.1, 0.0, 0.2).unwrap();
        let v = hh_potential(0.1, 0.0);
        assert_eq!(s[2], 0.0);
        assert!((s[3] - (2.0 * (0.2 - v)).sqrt()).abs() < 1e-15);
        assert!((hh_energy(&s) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn counterclockwise_convention_on_y_axis() {
        let e = ESCAPE_ENERGY + 0.05;
        let s = hh_initial_state(0.0, 0.1, e).unwrap();
        assert!(s[2] < 0.0);
        assert_eq!(s[3], 0.0);
        // Perpendicular to the position vector.
        assert_eq!(s[0] * s[2] + s[1] * s[3], 0.0);
    }

    #[test]
    fn shooting_errors() {
        assert_eq!(hh_initial_state(0.0, 0.0, 0.3), Err(SystemError::UndefinedTangent));
        assert!(matches!(
            hh_initial_state(0.0, 0.9, 0.1),
            Err(SystemError::ForbiddenRegion { .. })
        ));
    }

    #[test]
    fn immediate_classification_outside_radius() {
        let cfg = IntegratorConfig::for_system(super::super::SystemKind::HenonHeiles);
        let at = |deg: f64| {
            let (s, c) = deg.to_radians().sin_cos();
            [4.0 * c, 4.0 * s, 0.0, 0.0]
        };
        assert_eq!(classify_escape(&at(90.0), &cfg), 0);
        assert_eq!(classify_escape(&at(210.0), &cfg), 1);
        assert_eq!(classify_escape(&at(330.0), &cfg), 2);
        assert_eq!(exit_sector(1.0, 0.0), 2);
        assert_eq!(exit_sector(-1.0, 0.0), 1);
    }

    #[test]
    fn trapped_orbit_below_escape_energy_is_unresolved() {
        let cfg = IntegratorConfig { t_max: 50.0, ..IntegratorConfig::for_system(super::super::SystemKind::HenonHeiles) };
        let s = hh_initial_state(0.1, 0.1, 0.1).unwrap();
        assert_eq!(classify_escape(&s, &cfg), UNRESOLVED);
    }
}
