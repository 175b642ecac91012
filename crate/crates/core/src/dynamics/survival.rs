use num_complex::Complex64;

use super::kernel::modulation_factor;
use super::params::ModelParams;
use super::rk::{integrate_on_grid, Tolerances};
use super::{SolveStats, SolverConfig, Trajectory};
use crate::error::Result;

/// `(c1, c2)` for a given survival amplitude `E`:
///
/// ```text
/// c1 = (r2² + r1² E) c01 - r1 r2 (1 - E) c02
/// c2 = -r1 r2 (1 - E) c01 + (r1² + r2² E) c02
/// ```
pub fn amplitudes_from_survival(
    params: &ModelParams,
    survival: Complex64,
) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    Ok(reconstruct(params, survival))
}

fn reconstruct(p: &ModelParams, e: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let (r1, r2) = (p.r1, p.r2);
    let cross = (one - e) * (r1 * r2);
    let c1 = (e * (r1 * r1) + r2 * r2) * p.c01 - cross * p.c02;
    let c2 = -cross * p.c01 + (e * (r2 * r2) + r1 * r1) * p.c02;
    (c1, c2)
}

pub(crate) fn fill_amplitudes(
    params: &ModelParams,
    times: Vec<f64>,
    survival: Vec<Complex64>,
    stats: SolveStats,
) -> Trajectory {
    let (c1, c2) = survival.iter().map(|&e| reconstruct(params, e)).unzip();
    Trajectory {
        times,
        survival: Some(survival),
        c1,
        c2,
        stats,
    }
}

/// Solves `dE/dt = -R² ∫_0^t F(t, t') E(t') dt'` with `E(0) = 1`.
///
/// With `g(t) = exp(i (d/Ω) sin Ωt)` the kernel separates, and the auxiliary
/// memory `I(t) = ∫_0^t exp((-1 + iδ)(t - t')) conj(g(t')) E(t') dt'` turns the
/// equation into
///
/// ```text
/// dE/dt = -R² g(t) I
/// dI/dt = (-1 + iδ) I + conj(g(t)) E
/// ```
///
/// which is integrated adaptively at `(rel_tol, abs_tol)`.
pub fn solve_survival(params: &ModelParams, cfg: &SolverConfig) -> Result<Trajectory> {
    solve_survival_with_sign(params, cfg, -1.0)
}

/// `memory_sign = -1` is the physical equation; `+1` exists only so the
/// validation suite can demonstrate that it catches a flipped kernel.
pub(crate) fn solve_survival_with_sign(
    params: &ModelParams,
    cfg: &SolverConfig,
    memory_sign: f64,
) -> Result<Trajectory> {
    params.validate()?;
    cfg.validate()?;

    let coupling = memory_sign * params.rabi * params.rabi;
    let decay = Complex64::new(-1.0, params.detuning);
    let (d, omega) = (params.mod_amplitude, params.mod_frequency);
    let rhs = |t: f64, y: &[Complex64; 2]| {
        let g = modulation_factor(d, omega, t);
        [g * y[1] * coupling, decay * y[1] + g.conj() * y[0]]
    };

    let grid = cfg.output_grid();
    let tol = Tolerances {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
        max_steps: cfg.max_steps,
    };
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let (states, steps) = integrate_on_grid(rhs, y0, &grid, tol)?;

    let survival: Vec<Complex64> = states.iter().map(|y| y[0]).collect();
    let stats = SolveStats {
        steps_accepted: steps.accepted,
        steps_rejected: steps.rejected,
        rhs_evals: steps.rhs_evals,
    };
    Ok(fill_amplitudes(params, grid, survival, stats))
}
