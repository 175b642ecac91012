//! The modulated Lorentzian memory kernel.
//!
//! In λ-units and with the collective coupling `R²` factored out, the kernel
//! between two identical modulated qubits and the cavity is
//!
//! ```text
//! F(t, t') = exp((-1 + iδ)(t - t')) · g(t) · conj(g(t')),   g(t) = exp(i (d/Ω) sin Ωt)
//! ```
//!
//! The factorization into `g(t) conj(g(t'))` is what makes the survival
//! equation reducible to a finite ODE system.

use num_complex::Complex64;

use super::params::{modulation_phase, ModelParams};
use crate::bessel::bessel_j_orders;
use crate::error::{Error, Result};

/// `g(t) = exp(i (d/Ω) sin Ωt)`; identically 1 when `d = 0`.
pub fn modulation_factor(amplitude: f64, frequency: f64, t: f64) -> Complex64 {
    Complex64::cis(modulation_phase(amplitude, frequency, t))
}

/// Normalized memory kernel `F(t, t') / W²`.
pub fn kernel(params: &ModelParams, t: f64, t_prime: f64) -> Result<Complex64> {
    params.validate()?;
    if !(t_prime >= 0.0 && t >= t_prime) {
        return Err(Error::Argument(format!(
            "kernel needs t >= t' >= 0, got t = {t}, t' = {t_prime}"
        )));
    }
    let lag = t - t_prime;
    let memory = (Complex64::new(-1.0, params.detuning) * lag).exp();
    let (d, omega) = (params.mod_amplitude, params.mod_frequency);
    let phase = modulation_phase(d, omega, t) - modulation_phase(d, omega, t_prime);
    Ok(memory * Complex64::cis(phase))
}

/// Truncated Jacobi–Anger series for `exp(i z sin Ωt)` with `z = d/Ω`:
///
/// ```text
/// J_0(z) + 2 Σ_{n even} J_n(z) cos(nΩt) + 2i Σ_{n odd} J_n(z) sin(nΩt)
/// ```
///
/// summed for `n = 1 ..= n_terms`. Used to cross-check the exact phase and to
/// locate the sideband weights `J_n(d/Ω)`.
pub fn jacobi_anger_phase(d_over_omega: f64, omega: f64, t: f64, n_terms: usize) -> Complex64 {
    let j = bessel_j_orders(n_terms, d_over_omega);
    let theta = omega * t;
    let mut sum = Complex64::new(j[0], 0.0);
    for (n, &jn) in j.iter().enumerate().skip(1) {
        let arg = n as f64 * theta;
        sum += if n % 2 == 0 {
            Complex64::new(2.0 * jn * arg.cos(), 0.0)
        } else {
            Complex64::new(0.0, 2.0 * jn * arg.sin())
        };
    }
    sum
}
