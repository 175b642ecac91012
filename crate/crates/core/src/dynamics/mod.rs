//! Survival-amplitude and two-amplitude dynamics of the battery–charger pair.
//!
//! Two independent routes solve the same memory equation:
//!
//! * [`solve_survival`] turns the separable kernel into an equivalent
//!   two-component ODE and integrates it adaptively (production path);
//! * [`solve_survival_quadrature`] marches the Volterra form directly with
//!   trapezoidal history sums (oracle path).
//!
//! [`solve_general`] handles two different qubits with the same quadrature
//! machinery.

mod kernel;
mod params;
mod quadrature;
pub mod rk;
mod survival;

pub use kernel::{jacobi_anger_phase, kernel, modulation_factor};
pub use params::{GeneralParams, ModelParams, QubitDrive, NORMALIZATION_TOLERANCE};
pub use quadrature::{decoherence_free_check, solve_general, solve_survival_quadrature};
pub use survival::{amplitudes_from_survival, solve_survival};

pub(crate) use survival::solve_survival_with_sign;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack allowed on `|E| ≤ 1` and `|c1|² + |c2|² ≤ 1`.
pub const NORM_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Horizon in units of 1/λ.
    pub t_max: f64,
    /// Output grid spacing.
    pub dt_out: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Uniform step of the Volterra quadrature.
    pub quadrature_dt: f64,
    /// Step budget for the adaptive integrator.
    pub max_steps: usize,
    /// Turn the coarse-quadrature-grid warning into an error.
    pub strict_grid: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_max: 20.0,
            dt_out: 0.01,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            quadrature_dt: 1e-3,
            max_steps: 20_000_000,
            strict_grid: false,
        }
    }
}

impl SolverConfig {
    pub fn with_horizon(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be positive, got {v}")))
            }
        };
        positive("t_max", self.t_max)?;
        positive("dt_out", self.dt_out)?;
        positive("quadrature_dt", self.quadrature_dt)?;
        if self.dt_out > self.t_max {
            return Err(Error::Validation(format!(
                "dt_out = {} exceeds t_max = {}",
                self.dt_out, self.t_max
            )));
        }
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::Validation(format!("{name} = {tol} outside (0, 1e-2]")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::Validation("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Checks that `quadrature_dt` resolves `0.01 / max(1, R, Ω...)`. A coarse
    /// grid is an error under `strict_grid` and a logged warning otherwise.
    pub fn check_quadrature_grid(&self, rabi: f64, frequencies: &[f64]) -> Result<()> {
        quadrature::check_grid(self, rabi, frequencies)
    }

    /// `0, dt_out, 2 dt_out, ...` up to and including `t_max`.
    pub fn output_grid(&self) -> Vec<f64> {
        uniform_grid(self.t_max, self.dt_out)
    }
}

pub(crate) fn uniform_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt).round() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    // Drop points past the horizon and pin the last one to t_max exactly.
    while grid.len() > 1 && grid[grid.len() - 1] > t_max * (1.0 + 1e-12) {
        grid.pop();
    }
    let last = grid.len() - 1;
    if (grid[last] - t_max).abs() <= 1e-9 * dt {
        grid[last] = t_max;
    } else {
        grid.push(t_max);
    }
    grid
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
}

/// Qubit-sector amplitudes on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Survival amplitude of the symmetric state; `None` for two-qubit runs,
    /// where it is not defined.
    pub survival: Option<Vec<Complex64>>,
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
    pub stats: SolveStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks the trajectory-level invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.times.len();
        if self.c1.len() != n || self.c2.len() != n {
            return Err(Error::Validation("amplitude series length mismatch".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("time grid is not ascending".into()));
        }
        if let Some(survival) = &self.survival {
            if survival.len() != n {
                return Err(Error::Validation("survival series length mismatch".into()));
            }
            if survival.first() != Some(&Complex64::new(1.0, 0.0)) {
                return Err(Error::Validation("survival amplitude must start at 1".into()));
            }
            if let Some((k, e)) = survival
                .iter()
                .enumerate()
                .find(|(_, e)| !(e.norm() <= 1.0 + NORM_SLACK))
            {
                return Err(Error::Validation(format!(
                    "|E| = {} > 1 at t = {}",
                    e.norm(),
                    self.times[k]
                )));
            }
        }
        for k in 0..n {
            let norm = self.c1[k].norm_sqr() + self.c2[k].norm_sqr();
            if !(norm <= 1.0 + NORM_SLACK) {
                return Err(Error::Validation(format!(
                    "|c1|² + |c2|² = {norm} > 1 at t = {}",
                    self.times[k]
                )));
            }
        }
        Ok(())
    }

    /// Largest pointwise distance between the survival series of two runs on
    /// the same grid.
    pub fn survival_distance(&self, other: &Trajectory) -> Option<f64> {
        let (a, b) = (self.survival.as_ref()?, other.survival.as_ref()?);
        if a.len() != b.len() {
            return None;
        }
        Some(a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }

    /// Largest pointwise distance between the `(c1, c2)` series of two runs.
    pub fn amplitude_distance(&self, other: &Trajectory) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let d1 = self.c1.iter().zip(&other.c1).map(|(x, y)| (x - y).norm());
        let d2 = self.c2.iter().zip(&other.c2).map(|(x, y)| (x - y).norm());
        Some(d1.chain(d2).fold(0.0, f64::max))
    }
}
