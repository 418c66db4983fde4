//! Classical fixed-step fourth order Runge-Kutta.

use super::SystemError;

/// One RK4 step of `derivative(t, state)` from `t` to `t + dt`.
pub fn rk4_step<const N: usize, F>(
    state: &[f64; N],
    t: f64,
    dt: f64,
    derivative: F,
) -> Result<[f64; N], SystemError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let next = rk4_step_unchecked(state, t, dt, &derivative);
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(SystemError::NumericalBlowup { t: t + dt })
    }
}

#[inline]
pub(crate) fn rk4_step_unchecked<const N: usize, F>(
    state: &[f64; N],
    t: f64,
    dt: f64,
    derivative: &F,
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let half = 0.5 * dt;
    let k1 = derivative(t, state);
    let k2 = derivative(t + half, &axpy(state, half, &k1));
    let k3 = derivative(t + half, &axpy(state, half, &k2));
    let k4 = derivative(t + dt, &axpy(state, dt, &k3));
    let mut out = *state;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(x: &[f64; N], a: f64, y: &[f64; N]) -> [f64; N] {
    let mut out = *x;
    for i in 0..N {
        out[i] += a * y[i];
    }
    out
}
