//! Battery-side observables derived from a trajectory.
//!
//! With `H_B = (ω0/2) σ_z` the stored energy and ergotropy of the battery
//! depend only on its excited population `p = |c2|²`:
//! `ΔE_B / ω0 = p(τ) - p(0)` and `W / W_max = max(0, 2p - 1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{Trajectory, NORM_SLACK};
use crate::ergotropy::QuantumState;
use crate::error::{Error, Result};

/// Default band for [`summarize`], in units of ω0.
pub const DEFAULT_SETTLE_BAND: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    /// `|c1|²`.
    pub p_e_a: Vec<f64>,
    /// `|c2|²`.
    pub p_e_b: Vec<f64>,
    /// `ΔE_B / ω0`.
    pub d_e_b: Vec<f64>,
    /// `W / W_max`.
    pub w_ratio: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargingSummary {
    pub max_d_e_b: f64,
    /// Earliest time at which `max_d_e_b` is reached.
    pub t_at_max: f64,
    pub max_w_ratio: f64,
    /// First time after which `ΔE_B` stays within the band around its
    /// terminal value up to the horizon.
    pub settle_time: f64,
    pub terminal_d_e_b: f64,
}

fn qubit_state(p_excited: f64) -> Result<QuantumState> {
    let p = p_excited.clamp(0.0, 1.0);
    let diag = nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0 - p, 0.0),
        Complex64::new(p, 0.0),
    ]);
    QuantumState::new(DMatrix::from_diagonal(&diag))
}

/// Reduced states `(ρ_A, ρ_B)` of charger and battery, each
/// `diag(1 - |c|², |c|²)` in the `(|g⟩, |e⟩)` basis.
pub fn reduced_states(c1: Complex64, c2: Complex64) -> Result<(QuantumState, QuantumState)> {
    let norm = c1.norm_sqr() + c2.norm_sqr();
    if !(norm <= 1.0 + NORM_SLACK) {
        return Err(Error::Validation(format!(
            "|c1|² + |c2|² = {norm} exceeds 1"
        )));
    }
    Ok((qubit_state(c1.norm_sqr())?, qubit_state(c2.norm_sqr())?))
}

fn w_ratio(p: f64) -> f64 {
    (2.0 * p.min(1.0) - 1.0).max(0.0)
}

pub fn observable_series(traj: &Trajectory) -> ObservableSeries {
    let p_e_a: Vec<f64> = traj.c1.iter().map(|c| c.norm_sqr()).collect();
    let p_e_b: Vec<f64> = traj.c2.iter().map(|c| c.norm_sqr()).collect();
    let start = p_e_b.first().copied().unwrap_or(0.0);
    ObservableSeries {
        times: traj.times.clone(),
        d_e_b: p_e_b.iter().map(|p| p - start).collect(),
        w_ratio: p_e_b.iter().copied().map(w_ratio).collect(),
        p_e_a,
        p_e_b,
    }
}

pub fn summarize(series: &ObservableSeries, settle_band: f64) -> Result<ChargingSummary> {
    if series.times.is_empty() {
        return Err(Error::Argument("cannot summarize an empty series".into()));
    }
    if !(settle_band > 0.0) {
        return Err(Error::Argument(format!(
            "settle band must be positive, got {settle_band}"
        )));
    }
    let values = &series.d_e_b;
    let terminal = values[values.len() - 1];

    let (mut max_idx, mut max_val) = (0, values[0]);
    for (k, &v) in values.iter().enumerate() {
        if v > max_val {
            max_idx = k;
            max_val = v;
        }
    }

    let settle_time = match values
        .iter()
        .rposition(|v| (v - terminal).abs() >= settle_band)
    {
        // The terminal point is always inside the band, so `k + 1` exists.
        Some(k) => series.times[k + 1],
        None => series.times[0],
    };

    let max_w_ratio = series.w_ratio.iter().copied().fold(0.0, f64::max);
    Ok(ChargingSummary {
        max_d_e_b: max_val,
        t_at_max: series.times[max_idx],
        max_w_ratio,
        settle_time,
        terminal_d_e_b: terminal,
    })
}
