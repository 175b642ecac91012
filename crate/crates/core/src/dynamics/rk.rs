//! Dormand–Prince 5(4) with local extrapolation for small complex systems.
//!
//! Output is produced on a caller-supplied grid by landing steps exactly on
//! each grid point; the step-size controller keeps its own proposal so the
//! clamped steps do not shrink the natural step.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

pub type State<const N: usize> = [Complex64; N];

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

fn combine<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        *slot += acc * h;
    }
    out
}

/// Integrates `y' = f(t, y)` from `grid[0]` and returns the state at every
/// grid point. `grid` must be strictly increasing.
pub fn integrate_on_grid<const N: usize, F>(
    mut f: F,
    y0: State<N>,
    grid: &[f64],
    tol: Tolerances,
) -> Result<(Vec<State<N>>, StepStats)>
where
    F: FnMut(f64, &State<N>) -> State<N>,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut stats = StepStats::default();
    if grid.is_empty() {
        return Ok((out, stats));
    }
    out.push(y0);

    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.rhs_evals += 1;

    let span = grid[grid.len() - 1] - grid[0];
    let mut h_proposal = (span * 1e-3).clamp(1e-6, 1e-2);

    for &target in &grid[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= tol.max_steps {
                return Err(Error::SolverFailure {
                    last_good_time: t,
                    reason: format!("step budget of {} exhausted", tol.max_steps),
                });
            }
            let remaining = target - t;
            let lands = h_proposal >= remaining * (1.0 - 1e-12);
            let h = if lands { remaining } else { h_proposal };
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::SolverFailure {
                    last_good_time: t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }

            let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &combine(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = combine(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y_new);
            stats.rhs_evals += 6;

            let mut err_sq = 0.0;
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * h;
                let scale = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
                err_sq += (e.norm() / scale).powi(2);
            }
            let err = (err_sq / N as f64).sqrt();

            if !err.is_finite() {
                return Err(Error::SolverFailure {
                    last_good_time: t,
                    reason: "non-finite error estimate".into(),
                });
            }

            if err <= 1.0 {
                stats.accepted += 1;
                t = if lands { target } else { t + h };
                y = y_new;
                k1 = k7;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // A landing step shorter than the proposal says nothing about
                // whether the proposal itself was too large.
                if !lands || h >= h_proposal * (1.0 - 1e-12) {
                    h_proposal = h * factor;
                } else if factor < 1.0 {
                    h_proposal = h_proposal.min(h * factor);
                }
            } else {
                stats.rejected += 1;
                let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                h_proposal = h * factor;
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerances = Tolerances {
        rel: 1e-11,
        abs: 1e-13,
        max_steps: 1_000_000,
    };

    #[test]
    fn complex_exponential() {
        // y' = (-0.3 + 2i) y
        let rate = Complex64::new(-0.3, 2.0);
        let grid: Vec<f64> = (0..=50).map(|k| k as f64 * 0.2).collect();
        let (ys, stats) =
            integrate_on_grid(|_, y: &State<1>| [rate * y[0]], [Complex64::new(1.0, 0.0)], &grid, TIGHT)
                .unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            let exact = (rate * *t).exp();
            assert!((y[0] - exact).norm() < 1e-9, "t = {t}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn harmonic_oscillator_two_components() {
        // x'' = -x as a first-order system.
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (ys, _) = integrate_on_grid(|_, y: &State<2>| [y[1], -y[0]], [one, zero], &grid, TIGHT)
            .unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            assert!((y[0].re - t.cos()).abs() < 1e-9);
            assert!((y[1].re + t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn step_budget_exhaustion_reports_time() {
        let tol = Tolerances { max_steps: 3, ..TIGHT };
        let grid = [0.0, 10.0];
        let err = integrate_on_grid(
            |t, _: &State<1>| [Complex64::new((50.0 * t).cos(), 0.0)],
            [Complex64::new(0.0, 0.0)],
            &grid,
            tol,
        )
        .unwrap_err();
        match err {
            Error::SolverFailure { last_good_time, .. } => {
                assert!((0.0..10.0).contains(&last_good_time))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
