//! Reference computations that share no code with the production paths.
//!
//! These back the cross-check suites: closed-form unmodulated dynamics, a
//! brute-force ergotropy over all population assignments built on its own
//! Jacobi eigenvalue routine, and Bessel zeros from the integral
//! representation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

/// Unmodulated survival amplitude in closed form.
///
/// Solves `dE/dt = -R² ∫_0^t e^{-a(t-t')} E(t') dt'` with `a = 1 - iδ`,
/// whose Laplace transform is `(s + a) / (s² + a s + R²)`:
///
/// ```text
/// E(t) = e^{-at/2} [cosh(Dt/2) + (a/D) sinh(Dt/2)],   D = sqrt(a² - 4R²)
/// ```
pub fn unmodulated_survival(rabi: f64, detuning: f64, t: f64) -> Complex64 {
    let a = Complex64::new(1.0, -detuning);
    let disc = (a * a - 4.0 * rabi * rabi).sqrt();
    if disc.norm() < 1e-7 {
        // Critical damping: E = e^{-at/2} (1 + at/2).
        return (-a * t / 2.0).exp() * (a * t / 2.0 + 1.0);
    }
    let slow = (disc - a) * (t / 2.0);
    let fast = (-disc - a) * (t / 2.0);
    (a + disc) / (disc * 2.0) * slow.exp() - (a - disc) / (disc * 2.0) * fast.exp()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Eigenvalues of a complex Hermitian matrix through its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            real[i][j] = z.re;
            real[i + n][j + n] = z.re;
            real[i][j + n] = -z.im;
            real[i + n][j] = z.im;
        }
    }
    let mut values = jacobi_eigenvalues(real);
    values.sort_by(f64::total_cmp);
    values.into_iter().step_by(2).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for slot in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(slot, n - 1);
            out.push(p);
        }
    }
    out
}

/// `Tr(Hρ) - min_π Σ_k r_k ε_π(k)` over every assignment of the state's
/// eigenvalues to energy levels.
pub fn brute_force_ergotropy(rho: &DMatrix<Complex64>, ham: &DMatrix<Complex64>) -> f64 {
    let n = rho.nrows();
    let mut energy = 0.0;
    for i in 0..n {
        for j in 0..n {
            energy += (ham[(i, j)] * rho[(j, i)]).re;
        }
    }
    let r = hermitian_eigenvalues(rho);
    let e = hermitian_eigenvalues(ham);
    let passive = permutations(n)
        .iter()
        .map(|p| r.iter().zip(p).map(|(rk, &pk)| rk * e[pk]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    energy - passive
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `A A† / Tr(A A†)` for a random `dim × rank` matrix `A`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, rank.max(1), |_, _| random_complex(rng));
    let rho = &a * a.adjoint();
    let trace = rho.trace().re;
    let rho = rho.unscale(trace);
    (&rho + rho.adjoint()).unscale(2.0)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    (&a + a.adjoint()).unscale(2.0)
}

/// `J_n(x)` from `(1/2π) ∫_0^{2π} cos(nτ - x sin τ) dτ` (periodic trapezoid).
pub fn bessel_j_integral(n: u32, x: f64) -> f64 {
    let samples = 64 + 2 * (x.abs().ceil() as usize + n as usize);
    let h = 2.0 * PI / samples as f64;
    (0..samples)
        .map(|k| {
            let tau = k as f64 * h;
            (n as f64 * tau - x * tau.sin()).cos()
        })
        .sum::<f64>()
        / samples as f64
}

/// A zero of `J_n` bracketed by `[lo, hi]`, by bisection on the integral form.
pub fn bessel_j_zero(n: u32, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut f_lo = bessel_j_integral(n, lo);
    if f_lo * bessel_j_integral(n, hi) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = bessel_j_integral(n, mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid * f_lo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}
