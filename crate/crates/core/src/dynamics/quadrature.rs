//! Direct Volterra marching on a uniform grid.
//!
//! Every kernel used here has the form
//! `K_ij(t, t') = w_ij · exp(-(t - t')) · u_i(t) · v_j(t')`, so the history
//! sum at each step reduces to a weighted sum over stored `v_j(t_k) C_j(t_k)`
//! with a tabulated real decay. The memory integral is the composite
//! trapezoid rule and the amplitudes advance with the trapezoidal
//! (second-order) corrector; since the corrector is linear in the new value
//! it is solved exactly instead of iterated from a predictor.
//!
//! The scheme's error has an expansion in even powers of the step, so each
//! solve marches twice (steps `h` and `2h`) and returns the Richardson
//! combination `(4 C_h - C_2h) / 3`.

use num_complex::Complex64;

use super::kernel::modulation_factor;
use super::params::{GeneralParams, ModelParams, QubitDrive, NORMALIZATION_TOLERANCE};
use super::survival::fill_amplitudes;
use super::{SolveStats, SolverConfig, Trajectory};
use crate::error::{Error, Result};

/// History older than this many decay times contributes below 1e-17 and is skipped.
const MEMORY_CUTOFF: f64 = 40.0;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Coarse-grid guard: `quadrature_dt` must resolve the fastest scale.
pub(crate) fn check_grid(cfg: &SolverConfig, rabi: f64, frequencies: &[f64]) -> Result<()> {
    let fastest = frequencies.iter().copied().fold(rabi.max(1.0), f64::max);
    let limit = 0.01 / fastest;
    if cfg.quadrature_dt > limit {
        let msg = format!(
            "quadrature_dt = {} is coarser than 0.01/max(1, R, Omega) = {limit:e}",
            cfg.quadrature_dt
        );
        if cfg.strict_grid {
            return Err(Error::Configuration(msg));
        }
        log::warn!("{msg}");
    }
    Ok(())
}

struct SeparableKernel<const N: usize> {
    weights: [[f64; N]; N],
    /// `u_i(t_n)` and `v_j(t_n)` on the march grid.
    left: Vec<[Complex64; N]>,
    right: Vec<[Complex64; N]>,
}

/// Solves `A x = b` for small dense `N` by Gaussian elimination with partial
/// pivoting.
fn solve_small<const N: usize>(mut a: [[Complex64; N]; N], mut b: [Complex64; N]) -> [Complex64; N] {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                let delta = a[col][k] * factor;
                a[row][k] -= delta;
            }
            let delta = b[col] * factor;
            b[row] -= delta;
        }
    }
    let mut x = [zero(); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Marches `dC_i/dt = -R² Σ_j ∫_0^t K_ij(t, t') C_j(t') dt'` over `steps`
/// uniform steps of size `h`.
fn march<const N: usize>(
    kernel: &SeparableKernel<N>,
    rabi: f64,
    c0: [Complex64; N],
    h: f64,
    steps: usize,
) -> Vec<[Complex64; N]> {
    let coupling = rabi * rabi;
    let window = ((MEMORY_CUTOFF / h).ceil() as usize).max(1);
    let decay: Vec<f64> = (0..=steps.min(window)).map(|k| (-(k as f64) * h).exp()).collect();

    let mut amps = Vec::with_capacity(steps + 1);
    let mut weighted = Vec::with_capacity(steps + 1); // v_j(t_k) C_j(t_k)
    amps.push(c0);
    weighted.push(std::array::from_fn::<_, N, _>(|j| kernel.right[0][j] * c0[j]));
    let mut rate = [zero(); N]; // dC/dt at t_n; the memory is empty at t = 0

    for n in 0..steps {
        let next = n + 1;
        // S_j = h-free trapezoid sum of the history up to t_n, seen from t_{n+1}.
        let mut history = [zero(); N];
        let oldest = next.saturating_sub(window);
        for k in oldest..=n {
            let lag = next - k;
            let w = if k == 0 { 0.5 * decay[lag] } else { decay[lag] };
            for j in 0..N {
                history[j] += weighted[k][j] * w;
            }
        }

        let u = &kernel.left[next];
        let v = &kernel.right[next];
        let mut system = [[zero(); N]; N];
        let mut rhs = [zero(); N];
        for i in 0..N {
            let mut mixed = zero();
            for j in 0..N {
                mixed += history[j] * kernel.weights[i][j];
                system[i][j] = u[i] * v[j] * (0.25 * h * h * coupling * kernel.weights[i][j]);
            }
            system[i][i] += Complex64::new(1.0, 0.0);
            rhs[i] = amps[n][i] + rate[i] * (0.5 * h) - u[i] * mixed * (0.5 * h * h * coupling);
        }
        let c_next = solve_small(system, rhs);

        let w_next: [Complex64; N] = std::array::from_fn(|j| v[j] * c_next[j]);
        for i in 0..N {
            let mut mixed = zero();
            for j in 0..N {
                mixed += (history[j] * h + w_next[j] * (0.5 * h)) * kernel.weights[i][j];
            }
            rate[i] = -u[i] * mixed * coupling;
        }
        amps.push(c_next);
        weighted.push(w_next);
    }
    amps
}

/// Samples a uniformly spaced series at arbitrary times; exact hits are
/// copied, everything else uses 4-point Lagrange interpolation.
fn sample<const N: usize>(series: &[[Complex64; N]], h: f64, times: &[f64]) -> Vec<[Complex64; N]> {
    let last = series.len() - 1;
    times
        .iter()
        .map(|&t| {
            let s = t / h;
            let nearest = s.round();
            if (s - nearest).abs() < 1e-6 && (nearest as usize) <= last {
                return series[nearest as usize];
            }
            let base = (s.floor() as usize).saturating_sub(1).min(last.saturating_sub(3));
            let nodes: Vec<f64> = (0..4).map(|m| (base + m) as f64).collect();
            let mut out = [zero(); N];
            for m in 0..4 {
                let mut weight = 1.0;
                for q in 0..4 {
                    if q != m {
                        weight *= (s - nodes[q]) / (nodes[m] - nodes[q]);
                    }
                }
                for i in 0..N {
                    out[i] += series[base + m][i] * weight;
                }
            }
            out
        })
        .collect()
}

fn march_steps(t_max: f64, h: f64) -> usize {
    ((t_max / h) - 1e-9).ceil().max(3.0) as usize
}

/// Marches on steps `h` and `2h`, samples both at `times` and extrapolates.
fn extrapolated_march<const N: usize>(
    make_kernel: impl Fn(f64, usize) -> SeparableKernel<N>,
    rabi: f64,
    c0: [Complex64; N],
    cfg: &SolverConfig,
    times: &[f64],
) -> (Vec<[Complex64; N]>, usize) {
    let mut total_steps = 0;
    let mut runs = [1.0, 2.0].map(|factor| {
        let h = cfg.quadrature_dt * factor;
        let steps = march_steps(cfg.t_max, h);
        total_steps += steps;
        let amps = march(&make_kernel(h, steps), rabi, c0, h, steps);
        sample(&amps, h, times)
    });
    let coarse = std::mem::take(&mut runs[1]);
    let fine = std::mem::take(&mut runs[0]);
    let combined = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| std::array::from_fn(|i| (f[i] * 4.0 - c[i]) / 3.0))
        .collect();
    (combined, total_steps)
}

/// Survival amplitude by direct history integration; the oracle for
/// [`super::solve_survival`].
pub fn solve_survival_quadrature(params: &ModelParams, cfg: &SolverConfig) -> Result<Trajectory> {
    params.validate()?;
    cfg.validate()?;
    check_grid(cfg, params.rabi, &[params.mod_frequency])?;

    let drive = QubitDrive {
        detuning: params.detuning,
        mod_amplitude: params.mod_amplitude,
        mod_frequency: params.mod_frequency,
    };
    let make_kernel = |h: f64, steps: usize| {
        let left: Vec<[Complex64; 1]> =
            (0..=steps).map(|n| [left_factor(&drive, n as f64 * h)]).collect();
        SeparableKernel::<1> {
            weights: [[1.0]],
            right: left.iter().map(|u| [u[0].conj()]).collect(),
            left,
        }
    };
    let times = cfg.output_grid();
    let one = Complex64::new(1.0, 0.0);
    let (amps, steps) = extrapolated_march(make_kernel, params.rabi, [one], cfg, &times);

    let mut survival: Vec<Complex64> = amps.iter().map(|a| a[0]).collect();
    survival[0] = one;
    let stats = SolveStats {
        steps_accepted: steps,
        ..Default::default()
    };
    Ok(fill_amplitudes(params, times, survival, stats))
}

/// `u(t) = exp(iδt) · exp(i (d/Ω) sin Ωt)`.
fn left_factor(drive: &QubitDrive, t: f64) -> Complex64 {
    Complex64::cis(drive.detuning * t) * modulation_factor(drive.mod_amplitude, drive.mod_frequency, t)
}

/// Two-amplitude dynamics for possibly different qubits, by direct Volterra
/// quadrature:
///
/// ```text
/// dC1/dt = -R² ∫ e^{-(t-t')} e^{iδ_A (t-t')} [ r1² e^{i(φ_A(t)-φ_A(t'))} C1(t')
///                + r1 r2 e^{iφ_A(t) - iφ_B(t')} e^{iδ_AB t'} C2(t') ] dt'
/// ```
///
/// and symmetrically for `C2`, with `φ_j(t) = (d_j/Ω_j) sin Ω_j t`.
/// The survival field of the result is `None`.
pub fn solve_general(
    gparams: &GeneralParams,
    cfg: &SolverConfig,
    c01: Complex64,
    c02: Complex64,
) -> Result<Trajectory> {
    gparams.validate()?;
    cfg.validate()?;
    let norm = c01.norm_sqr() + c02.norm_sqr();
    if !((norm - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::Validation(format!(
            "|c01|² + |c02|² = {norm}, expected 1"
        )));
    }
    check_grid(
        cfg,
        gparams.rabi,
        &[gparams.charger.mod_frequency, gparams.battery.mod_frequency],
    )?;

    let (r1, r2) = gparams.relative_couplings();
    let drives = [gparams.charger, gparams.battery];
    let make_kernel = |h: f64, steps: usize| {
        let left: Vec<[Complex64; 2]> = (0..=steps)
            .map(|n| {
                let t = n as f64 * h;
                [left_factor(&drives[0], t), left_factor(&drives[1], t)]
            })
            .collect();
        SeparableKernel::<2> {
            weights: [[r1 * r1, r1 * r2], [r1 * r2, r2 * r2]],
            right: left.iter().map(|u| [u[0].conj(), u[1].conj()]).collect(),
            left,
        }
    };
    let times = cfg.output_grid();
    let (mut sampled, steps) = extrapolated_march(make_kernel, gparams.rabi, [c01, c02], cfg, &times);
    sampled[0] = [c01, c02];
    let (c1, c2) = sampled.iter().map(|a| (a[0], a[1])).unzip();
    Ok(Trajectory {
        times,
        survival: None,
        c1,
        c2,
        stats: SolveStats {
            steps_accepted: steps,
            ..Default::default()
        },
    })
}

/// Largest distance of `(C1, C2)` from its start when the pair is prepared
/// in the dark state `r2|e_A, g_B⟩ - r1|g_A, e_B⟩`.
pub fn decoherence_free_check(params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    params.validate()?;
    let (r1, r2) = (params.r1, params.r2);
    let start = (Complex64::new(r2, 0.0), Complex64::new(-r1, 0.0));
    let traj = solve_general(&params.to_general(), cfg, start.0, start.1)?;
    Ok(traj
        .c1
        .iter()
        .zip(&traj.c2)
        .map(|(a, b)| ((a - start.0).norm_sqr() + (b - start.1).norm_sqr()).sqrt())
        .fold(0.0, f64::max))
}
