//! The oracle suite behind `qbattery validate`.

use std::fmt;

use qbattery::dynamics::modulation_factor;
use qbattery::oracle::{brute_force_ergotropy, random_density_matrix, random_hamiltonian, unmodulated_survival};
use qbattery::{
    decoherence_free_check, ergotropy, jacobi_anger_phase, passive_state, solve_general, solve_survival,
    solve_survival_quadrature, HamiltonianSpec, ModelParams, QuantumState, SolverConfig, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{grid_key, parse_config};
use crate::error::CliResult;
use crate::presets;

/// Deliberate faults for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the memory term in the adaptive solver.
    FlipMemorySign,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Fewer grid points, shorter horizons and fewer random states.
    pub fast: bool,
    /// Tolerances and `quadrature_dt`; `t_max` caps the check horizon.
    pub cfg: SolverConfig,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            fast: false,
            cfg: SolverConfig::default(),
            fault: None,
            seed: 0x00c0_ffee,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:<22} residual {:.3e} (tol {:.0e})", self.name, self.residual, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

fn outcome(name: &'static str, residual: f64, tolerance: f64, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed: residual <= tolerance, residual, tolerance, detail }
}

fn adaptive(opts: &ValidateOptions, p: &ModelParams, cfg: &SolverConfig) -> qbattery::Result<Trajectory> {
    match opts.fault {
        None => solve_survival(p, cfg),
        Some(Fault::FlipMemorySign) => qbattery::fault::solve_survival_flipped(p, cfg),
    }
}

fn horizon(opts: &ValidateOptions, full: f64) -> SolverConfig {
    let t_max = if opts.fast { 5.0 } else { full };
    SolverConfig { strict_grid: true, ..opts.cfg.with_horizon(opts.cfg.t_max.min(t_max)) }
}

fn analytic_limit(opts: &ValidateOptions) -> CliResult<CheckOutcome> {
    let cfg = horizon(opts, 20.0);
    let mut worst: f64 = 0.0;
    for &rabi in &[0.1, 1.0, 5.0] {
        for &detuning in &[0.0, 1.0, -1.0, 5.0, -5.0] {
            let traj = adaptive(opts, &ModelParams::new(rabi).with_detuning(detuning), &cfg)?;
            if let Err(e) = traj.check_invariants() {
                return Ok(CheckOutcome {
                    name: "analytic-limit",
                    passed: false,
                    residual: f64::INFINITY,
                    tolerance: 1e-8,
                    detail: format!("R={rabi} delta={detuning}: {e}"),
                });
            }
            for (&t, e) in traj.times.iter().zip(traj.survival.as_ref().expect("survival")) {
                worst = worst.max((e - unmodulated_survival(rabi, detuning, t)).norm());
            }
        }
    }
    Ok(outcome("analytic-limit", worst, 1e-8, "15 unmodulated cases vs closed form".into()))
}

/// Unique grid points of every preset.
fn preset_points() -> CliResult<Vec<ModelParams>> {
    let mut points = Vec::new();
    for name in presets::names() {
        let spec = parse_config(presets::get(name).expect("listed preset"), name)?;
        points.extend(spec.grid()?);
    }
    points.sort_by(|a, b| grid_key(a).partial_cmp(&grid_key(b)).expect("finite"));
    points.dedup_by(|a, b| grid_key(a) == grid_key(b));
    Ok(points)
}

fn solver_pair(opts: &ValidateOptions, points: &[ModelParams]) -> CliResult<[CheckOutcome; 2]> {
    let cfg = horizon(opts, 20.0);
    let distances: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| -> CliResult<(f64, f64)> {
            let ode = adaptive(opts, p, &cfg)?;
            let quad = solve_survival_quadrature(p, &cfg)?;
            let general = solve_general(&p.to_general(), &cfg, p.c01, p.c02)?;
            Ok((
                ode.survival_distance(&quad).unwrap_or(f64::INFINITY),
                ode.amplitude_distance(&general).unwrap_or(f64::INFINITY),
            ))
        })
        .collect::<CliResult<_>>()?;
    let dual = distances.iter().map(|d| d.0).fold(0.0, f64::max);
    let reduction = distances.iter().map(|d| d.1).fold(0.0, f64::max);
    let detail = format!("{} grid points, horizon {}", points.len(), cfg.t_max);
    Ok([
        outcome("dual-solver", dual, 1e-6, detail.clone()),
        outcome("reduction-consistency", reduction, 1e-5, detail),
    ])
}

fn ergotropy_suite(opts: &ValidateOptions) -> CliResult<CheckOutcome> {
    let samples = if opts.fast { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let dim = rng.random_range(2..=5);
        let rank = rng.random_range(1..=dim);
        let state = QuantumState::new(random_density_matrix(&mut rng, dim, rank))?;
        let ham = HamiltonianSpec::new(random_hamiltonian(&mut rng, dim))?;
        let result = ergotropy(&state, &ham)?;
        let reference = brute_force_ergotropy(state.matrix(), ham.matrix());
        let sigma = passive_state(&state, &ham)?;
        let residue = ergotropy(&sigma, &ham)?.ergotropy.abs();
        let negativity = (-result.ergotropy).max(0.0);
        worst = worst.max((result.ergotropy - reference).abs()).max(residue).max(negativity);
    }
    Ok(outcome("ergotropy-brute-force", worst, 1e-10, format!("{samples} random states, dim 2-5")))
}

fn jacobi_anger() -> CheckOutcome {
    let omega = 1.0;
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let z = 0.1 * k as f64;
        for j in 0..=200 {
            let t = period * j as f64 / 200.0;
            worst = worst.max((jacobi_anger_phase(z, omega, t, 40) - modulation_factor(z * omega, omega, t)).norm());
        }
    }
    outcome("jacobi-anger", worst, 1e-10, "40 terms, d/Omega in [0, 10], one period".into())
}

fn decoherence_free(opts: &ValidateOptions) -> CliResult<CheckOutcome> {
    let cfg = horizon(opts, 20.0);
    let mut cases = vec![
        ModelParams::new(5.0).with_modulation(10.0, 1.0).with_couplings(0.6, 0.8),
        ModelParams::new(5.0).with_couplings(1.0, 0.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xdf);
    for _ in 0..if opts.fast { 1 } else { 5 } {
        cases.push(
            ModelParams::new(rng.random_range(0.1..5.0))
                .with_detuning(rng.random_range(-2.0..2.0))
                .with_modulation(rng.random_range(0.0..10.0), rng.random_range(0.5..10.0))
                .with_r1(rng.random_range(0.05..0.95)),
        );
    }
    let mut worst: f64 = 0.0;
    for p in &cases {
        worst = worst.max(decoherence_free_check(p, &cfg)?);
    }
    Ok(outcome("decoherence-free", worst, 1e-6, format!("{} parameter sets", cases.len())))
}

/// Runs every check. Configuration problems (such as a coarse
/// `quadrature_dt`) are errors rather than failed checks.
pub fn validate(opts: &ValidateOptions) -> CliResult<Vec<CheckOutcome>> {
    opts.cfg.validate()?;
    let points = if opts.fast {
        vec![ModelParams::new(5.0).with_modulation(10.0, 1.0), ModelParams::new(0.1).with_modulation(10.0, 0.1)]
    } else {
        preset_points()?
    };
    let strict = horizon(opts, 20.0);
    for p in &points {
        strict.check_quadrature_grid(p.rabi, &[p.mod_frequency])?;
    }

    let mut out = vec![analytic_limit(opts)?];
    out.extend(solver_pair(opts, &points)?);
    out.push(ergotropy_suite(opts)?);
    out.push(jacobi_anger());
    out.push(decoherence_free(opts)?);
    Ok(out)
}
