//! Relaxed Newton map `z <- z - b p(z)/p'(z)` for real-coefficient
//! polynomials, and Aberth-Ehrlich simultaneous root finding.

use super::SystemError;
use crate::grid::UNRESOLVED;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const ABERTH_MAX_ITER: usize = 1000;
const POLISH_STEPS: usize = 3;
const RESIDUAL_FACTOR: f64 = 1e-9;

/// `p(z) = sum_k coeffs[k] z^k` and the relaxation factor `b = b[0] + i b[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonParams {
    pub coeffs: Vec<f64>,
    pub b: [f64; 2],
}

impl NewtonParams {
    pub fn relaxation(&self) -> Complex64 {
        Complex64::new(self.b[0], self.b[1])
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        if self.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(SystemError::InvalidParams("non-finite coefficient".into()));
        }
        if degree(&self.coeffs).unwrap_or(0) < 1 {
            return Err(SystemError::InvalidParams("polynomial must have degree >= 1".into()));
        }
        let b = self.relaxation();
        if !(b.re.is_finite() && b.im.is_finite()) || b.norm() == 0.0 {
            return Err(SystemError::InvalidParams("b must be finite and non-zero".into()));
        }
        Ok(())
    }
}

fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&a| a != 0.0)
}

/// Horner evaluation of `p` and `p'` at `z`.
#[inline]
pub fn eval_poly(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of `sum_k coeffs[k] z^k`, each with
/// `|p(root)| < 1e-9 * max|a_k|`.
///
/// Trailing zero coefficients are ignored. Roots come back ordered by
/// argument in `[0, 2π)`, then by modulus.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, SystemError> {
    let deg = degree(coeffs)
        .filter(|&d| d >= 1)
        .ok_or_else(|| SystemError::RootFindingFailed("degree < 1".into()))?;
    if coeffs.iter().any(|a| !a.is_finite()) {
        return Err(SystemError::RootFindingFailed("non-finite coefficient".into()));
    }
    let poly = &coeffs[..=deg];
    let lead = poly[deg];
    let radius = 1.0 + poly[..deg].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max);

    // Start on a circle, rotated off the real axis so conjugate pairs split.
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / deg as f64 + 0.4))
        .collect();

    let mut converged = false;
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let z = roots[k];
            let (p, dp) = eval_poly(poly, z);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| (z - roots[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                roots[k] = z - step;
                max_step = max_step.max(step.norm() / (1.0 + z.norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }

    for r in roots.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = eval_poly(poly, *r);
            let cand = *r - p / dp;
            if !(cand.re.is_finite() && cand.im.is_finite()) {
                break;
            }
            if eval_poly(poly, cand).0.norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }

    let scale = poly.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let tol = RESIDUAL_FACTOR * scale;
    for r in &roots {
        let residual = eval_poly(poly, *r).0.norm();
        if residual.is_nan() || residual >= tol {
            return Err(SystemError::RootFindingFailed(format!(
                "root {r} has residual {residual:e} (limit {tol:e}, converged: {converged})"
            )));
        }
    }

    roots.sort_by(|a, b| {
        let key = |z: &Complex64| {
            let mut arg = z.im.atan2(z.re);
            if arg < 0.0 {
                arg += TAU;
            }
            // Collapse -0 / rounding noise on the positive real axis.
            if TAU - arg < 1e-12 {
                arg = 0.0;
            }
            arg
        };
        key(a).total_cmp(&key(b)).then(a.norm().total_cmp(&b.norm()))
    });
    Ok(roots)
}

/// Newton map with precomputed roots.
#[derive(Debug, Clone)]
pub struct NewtonMap {
    coeffs: Vec<f64>,
    b: Complex64,
    roots: Vec<Complex64>,
}

impl NewtonMap {
    pub fn new(params: &NewtonParams) -> Result<Self, SystemError> {
        params.validate()?;
        let roots = polynomial_roots(&params.coeffs)?;
        let deg = degree(&params.coeffs).unwrap_or(0);
        Ok(NewtonMap {
            coeffs: params.coeffs[..=deg].to_vec(),
            b: params.relaxation(),
            roots,
        })
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    fn nearest_root(&self, z: Complex64) -> (usize, f64) {
        self.roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("degree >= 1")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    /// Root index, or [`UNRESOLVED`].
    pub label: u8,
    pub iterations: u32,
    pub z: Complex64,
}

/// Iterate the relaxed Newton map from `z0` until the step drops below
/// `newton_tol` (or `z` already sits on a root), then label by the nearest
/// root within `match_tol`.
pub fn classify_newton(
    z0: Complex64,
    map: &NewtonMap,
    config: &super::IntegratorConfig,
) -> NewtonOutcome {
    let unresolved = |iterations, z| NewtonOutcome { label: UNRESOLVED, iterations, z };
    let mut z = z0;
    let mut iterations = 0u32;
    while iterations < config.newton_max_iter {
        if map.nearest_root(z).1 < config.newton_tol {
            break;
        }
        let (p, dp) = eval_poly(&map.coeffs, z);
        if dp.norm() == 0.0 {
            return unresolved(iterations, z);
        }
        let step = map.b * p / dp;
        z -= step;
        iterations += 1;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return unresolved(iterations, z);
        }
        if step.norm() < config.newton_tol {
            break;
        }
    }
    let (idx, dist) = map.nearest_root(z);
    if dist <= config.match_tol {
        NewtonOutcome { label: idx as u8, iterations, z }
    } else {
        unresolved(iterations, z)
    }
}

#[cfg(test)]
mod tests {
    use super::super::IntegratorConfig;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity() {
        let roots = polynomial_roots(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(roots.len(), 5);
        for (k, r) in roots.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, TAU * k as f64 / 5.0);
            assert!((r - expected).norm() < 1e-12, "{k}: {r} vs {expected}");
        }
    }

    #[test]
    fn constructed_factorization() {
        // (z-1)(z-2)(z-3)(z-4)(z-5)
        let coeffs = [-120.0, 274.0, -225.0, 85.0, -15.0, 1.0];
        let roots = polynomial_roots(&coeffs).unwrap();
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        for (k, r) in re.iter().enumerate() {
            assert!((r - (k + 1) as f64).abs() < 1e-9, "{re:?}");
        }
        assert!(roots.iter().all(|r| r.im.abs() < 1e-9));
    }

    #[test]
    fn trailing_zeros_and_constants() {
        let roots = polynomial_roots(&[-1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(polynomial_roots(&[3.0, 0.0]).is_err());
    }

    #[test]
    fn cubic_real_axis_attraction() {
        let map = NewtonMap::new(&NewtonParams { coeffs: vec![-1.0, 0.0, 0.0, 1.0], b: [1.0, 0.0] })
            .unwrap();
        let out = classify_newton(c(1.1, 0.0), &map, &IntegratorConfig::default());
        assert_eq!(out.label, 0);
        assert!((map.roots()[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn starting_on_a_root_takes_zero_iterations() {
        let map = NewtonMap::new(&NewtonParams { coeffs: vec![-1.0, 0.0, 0.0, 1.0], b: [1.0, 0.0] })
            .unwrap();
        for (i, &r) in map.roots().iter().enumerate() {
            let out = classify_newton(r, &map, &IntegratorConfig::default());
            assert_eq!(out.label as usize, i);
            assert_eq!(out.iterations, 0);
        }
    }

    #[test]
    fn critical_point_is_unresolved() {
        // p'(0) = 0 for z^2 - 1.
        let map = NewtonMap::new(&NewtonParams { coeffs: vec![-1.0, 0.0, 1.0], b: [1.0, 0.0] })
            .unwrap();
        let out = classify_newton(c(0.0, 0.0), &map, &IntegratorConfig::default());
        assert_eq!(out.label, UNRESOLVED);
    }

    #[test]
    fn rejects_zero_relaxation() {
        let p = NewtonParams { coeffs: vec![-1.0, 0.0, 1.0], b: [0.0, 0.0] };
        assert!(NewtonMap::new(&p).is_err());
    }
}
