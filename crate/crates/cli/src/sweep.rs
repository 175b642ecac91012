//! Runs a sweep and writes one series CSV per grid point plus an index.
//!
//! Layout of `output_dir`:
//!
//! * `<label>_R<R>_delta<δ>_d<d>_Omega<Ω>.csv`: columns
//!   `t, re_E, im_E, abs_E2, p_e_A, p_e_B, dE_B_over_w0, W_over_Wmax`;
//! * `index.csv`: one summary row per successful point, sorted by grid key;
//! * `diagnostics.csv`: solver statistics and errors for every point.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), so a fixed spec
//! produces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use qbattery::{
    observable_series, solve_survival, solve_survival_quadrature, summarize, ChargingSummary, ModelParams,
    ObservableSeries, Trajectory,
};
use rayon::prelude::*;

use crate::config::{sanitize, SweepSpec};
use crate::error::{CliError, CliResult};

pub const SERIES_COLUMNS: [&str; 8] =
    ["t", "re_E", "im_E", "abs_E2", "p_e_A", "p_e_B", "dE_B_over_w0", "W_over_Wmax"];

pub const INDEX_COLUMNS: [&str; 12] = [
    "label", "R", "delta", "d", "Omega", "r1", "max_dE_B", "t_at_max", "max_W_ratio", "settle_time",
    "terminal_dE_B", "series_path",
];

pub const INDEX_FILE: &str = "index.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

/// Band used for the `settle_time` column.
pub const SETTLE_BAND: f64 = qbattery::observables::DEFAULT_SETTLE_BAND;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
    /// Sup distance to the quadrature oracle, when checking was requested.
    pub oracle_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub params: ModelParams,
    pub summary: Option<ChargingSummary>,
    pub series_path: Option<PathBuf>,
    pub diagnostics: Diagnostics,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Also run the quadrature oracle at every point.
    pub check: bool,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn series_file_name(label: &str, p: &ModelParams) -> String {
    format!(
        "{}_R{}_delta{}_d{}_Omega{}.csv",
        sanitize(label),
        p.rabi,
        p.detuning,
        p.mod_amplitude,
        p.mod_frequency
    )
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv { path: path.to_path_buf(), source })
}

fn write_series(path: &Path, traj: &Trajectory, series: &ObservableSeries) -> CliResult<()> {
    let survival = traj.survival.as_ref().expect("survival runs carry E(t)");
    let mut w = csv_writer(path)?;
    let wrap = |source| CliError::Csv { path: path.to_path_buf(), source };
    w.write_record(SERIES_COLUMNS).map_err(wrap)?;
    for (k, e) in survival.iter().enumerate() {
        w.write_record([
            num(traj.times[k]),
            num(e.re),
            num(e.im),
            num(e.norm_sqr()),
            num(series.p_e_a[k]),
            num(series.p_e_b[k]),
            num(series.d_e_b[k]),
            num(series.w_ratio[k]),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn empty_record(p: &ModelParams) -> RunRecord {
    RunRecord {
        params: *p,
        summary: None,
        series_path: None,
        diagnostics: Diagnostics::default(),
        error: None,
    }
}

fn execute(spec: &SweepSpec, check: bool, record: &mut RunRecord) -> CliResult<()> {
    let p = record.params;
    let traj = solve_survival(&p, &spec.cfg)?;
    record.diagnostics.steps_accepted = traj.stats.steps_accepted;
    record.diagnostics.steps_rejected = traj.stats.steps_rejected;
    record.diagnostics.rhs_evals = traj.stats.rhs_evals;
    traj.check_invariants()?;
    if check {
        let oracle = solve_survival_quadrature(&p, &spec.cfg)?;
        record.diagnostics.oracle_residual = traj.survival_distance(&oracle);
    }
    let series = observable_series(&traj);
    record.summary = Some(summarize(&series, SETTLE_BAND)?);
    let path = spec.output_dir.join(series_file_name(&spec.label, &p));
    write_series(&path, &traj, &series)?;
    record.series_path = Some(path);
    Ok(())
}

fn run_point(spec: &SweepSpec, p: &ModelParams, check: bool) -> RunRecord {
    let mut record = empty_record(p);
    if let Err(e) = execute(spec, check, &mut record) {
        log::error!("R={} delta={} d={} Omega={}: {e}", p.rabi, p.detuning, p.mod_amplitude, p.mod_frequency);
        record.error = Some(e.to_string());
    }
    record
}

fn write_index(spec: &SweepSpec, records: &[RunRecord]) -> CliResult<()> {
    let path = spec.output_dir.join(INDEX_FILE);
    let mut w = csv_writer(&path)?;
    let wrap = |source| CliError::Csv { path: path.clone(), source };
    w.write_record(INDEX_COLUMNS).map_err(wrap)?;
    for r in records {
        let (Some(s), Some(series)) = (&r.summary, &r.series_path) else { continue };
        let name = series.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let p = &r.params;
        w.write_record([
            spec.label.clone(),
            num(p.rabi),
            num(p.detuning),
            num(p.mod_amplitude),
            num(p.mod_frequency),
            num(p.r1),
            num(s.max_d_e_b),
            num(s.t_at_max),
            num(s.max_w_ratio),
            num(s.settle_time),
            num(s.terminal_d_e_b),
            name.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}

fn write_diagnostics(spec: &SweepSpec, records: &[RunRecord]) -> CliResult<()> {
    let path = spec.output_dir.join(DIAGNOSTICS_FILE);
    let mut w = csv_writer(&path)?;
    let wrap = |source| CliError::Csv { path: path.clone(), source };
    w.write_record([
        "R", "delta", "d", "Omega", "steps_accepted", "steps_rejected", "rhs_evals", "oracle_residual", "error",
    ])
    .map_err(wrap)?;
    for r in records {
        let p = &r.params;
        let d = &r.diagnostics;
        w.write_record([
            num(p.rabi),
            num(p.detuning),
            num(p.mod_amplitude),
            num(p.mod_frequency),
            d.steps_accepted.to_string(),
            d.steps_rejected.to_string(),
            d.rhs_evals.to_string(),
            d.oracle_residual.map(num).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))
}

/// Runs every grid point, writes the CSVs and returns the records in grid
/// order. Failed points are logged and recorded, not fatal.
pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> CliResult<Vec<RunRecord>> {
    let points = spec.grid()?;
    fs::create_dir_all(&spec.output_dir).map_err(|e| CliError::io(&spec.output_dir, e))?;
    log::info!("{}: {} grid points -> {}", spec.label, points.len(), spec.output_dir.display());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", opts.workers)))?;
    // `collect` keeps input order, which is already the sorted grid order.
    let records: Vec<RunRecord> =
        pool.install(|| points.par_iter().map(|p| run_point(spec, p, opts.check)).collect());

    write_index(spec, &records)?;
    write_diagnostics(spec, &records)?;
    Ok(records)
}

/// Single-point run; the spec must expand to exactly one grid point.
/// Errors propagate with their own kind instead of being recorded.
pub fn simulate(spec: &SweepSpec) -> CliResult<RunRecord> {
    let points = spec.grid()?;
    if points.len() != 1 {
        return Err(CliError::Usage(format!(
            "simulate needs a single grid point, the config expands to {}; use `sweep`",
            points.len()
        )));
    }
    fs::create_dir_all(&spec.output_dir).map_err(|e| CliError::io(&spec.output_dir, e))?;
    let mut record = empty_record(&points[0]);
    execute(spec, false, &mut record)?;
    let records = [record];
    write_index(spec, &records)?;
    write_diagnostics(spec, &records)?;
    let [record] = records;
    Ok(record)
}
