use num_complex::Complex64;

use crate::error::{Error, Result};

/// Band for the `r1² + r2² = 1` and `|c01|² + |c02|² = 1` constraints.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Identical-qubit model. Every rate is in units of the cavity loss rate λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Collective vacuum Rabi frequency `R`.
    pub rabi: f64,
    /// Qubit–cavity detuning `δ = ω0 - ωc`.
    pub detuning: f64,
    /// Modulation amplitude `d`.
    pub mod_amplitude: f64,
    /// Modulation frequency `Ω`. May be zero only when `mod_amplitude` is zero.
    pub mod_frequency: f64,
    /// Relative coupling of the charger (qubit A).
    pub r1: f64,
    /// Relative coupling of the battery (qubit B).
    pub r2: f64,
    /// Initial amplitude on `|e_A, g_B⟩`.
    pub c01: Complex64,
    /// Initial amplitude on `|g_A, e_B⟩`.
    pub c02: Complex64,
    /// Qubit transition frequency; only scales absolute energies.
    pub omega0: f64,
}

impl ModelParams {
    /// Resonant, unmodulated, equally coupled model with the charger excited.
    pub fn new(rabi: f64) -> Self {
        Self {
            rabi,
            detuning: 0.0,
            mod_amplitude: 0.0,
            mod_frequency: 0.0,
            r1: std::f64::consts::FRAC_1_SQRT_2,
            r2: std::f64::consts::FRAC_1_SQRT_2,
            c01: Complex64::new(1.0, 0.0),
            c02: Complex64::new(0.0, 0.0),
            omega0: 1.0,
        }
    }

    pub fn with_modulation(mut self, amplitude: f64, frequency: f64) -> Self {
        self.mod_amplitude = amplitude;
        self.mod_frequency = frequency;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    /// Sets `r1` and derives `r2 = sqrt(1 - r1²)`.
    pub fn with_r1(mut self, r1: f64) -> Self {
        self.r1 = r1;
        self.r2 = (1.0 - r1 * r1).max(0.0).sqrt();
        self
    }

    pub fn with_couplings(mut self, r1: f64, r2: f64) -> Self {
        self.r1 = r1;
        self.r2 = r2;
        self
    }

    pub fn with_initial(mut self, c01: Complex64, c02: Complex64) -> Self {
        self.c01 = c01;
        self.c02 = c02;
        self
    }

    pub fn is_modulated(&self) -> bool {
        self.mod_amplitude != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::Validation(format!("R must be positive, got {}", self.rabi)));
        }
        if !self.detuning.is_finite() {
            return Err(Error::Validation("detuning must be finite".into()));
        }
        validate_drive(self.mod_amplitude, self.mod_frequency)?;
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Validation(format!("{name} = {r} outside [0, 1]")));
            }
        }
        let coupling_norm = self.r1 * self.r1 + self.r2 * self.r2;
        if (coupling_norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Validation(format!(
                "r1² + r2² = {coupling_norm}, expected 1"
            )));
        }
        let state_norm = self.c01.norm_sqr() + self.c02.norm_sqr();
        if !((state_norm - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::Validation(format!(
                "|c01|² + |c02|² = {state_norm}, expected 1"
            )));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Validation(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// The same physics expressed in the two-qubit form.
    pub fn to_general(&self) -> GeneralParams {
        let drive = QubitDrive {
            detuning: self.detuning,
            mod_amplitude: self.mod_amplitude,
            mod_frequency: self.mod_frequency,
        };
        GeneralParams {
            charger: drive,
            battery: drive,
            mu1: self.r1,
            mu2: self.r2,
            rabi: self.rabi,
        }
    }
}

pub(crate) fn validate_drive(amplitude: f64, frequency: f64) -> Result<()> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::Validation(format!(
            "modulation amplitude d must be non-negative, got {amplitude}"
        )));
    }
    if !(frequency >= 0.0 && frequency.is_finite()) {
        return Err(Error::Validation(format!(
            "modulation frequency Omega must be non-negative, got {frequency}"
        )));
    }
    if frequency == 0.0 && amplitude != 0.0 {
        return Err(Error::Configuration(format!(
            "Omega = 0 with d = {amplitude}: express modulation-off as d = 0"
        )));
    }
    Ok(())
}

/// Frequency drive of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDrive {
    /// `δ_j = ω_j - ωc`.
    pub detuning: f64,
    pub mod_amplitude: f64,
    pub mod_frequency: f64,
}

impl QubitDrive {
    pub fn resonant() -> Self {
        Self {
            detuning: 0.0,
            mod_amplitude: 0.0,
            mod_frequency: 0.0,
        }
    }

    /// Accumulated modulation phase `(d/Ω) sin(Ωt)`, zero when `d = 0`.
    pub fn phase(&self, t: f64) -> f64 {
        modulation_phase(self.mod_amplitude, self.mod_frequency, t)
    }
}

pub(crate) fn modulation_phase(amplitude: f64, frequency: f64, t: f64) -> f64 {
    if amplitude == 0.0 {
        0.0
    } else {
        amplitude / frequency * (frequency * t).sin()
    }
}

/// Two possibly different qubits sharing the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralParams {
    /// Qubit A, amplitude `C1`.
    pub charger: QubitDrive,
    /// Qubit B, amplitude `C2`.
    pub battery: QubitDrive,
    /// Absolute coupling weights; normalized to `r_i = μ_i / μ_T` before use.
    pub mu1: f64,
    pub mu2: f64,
    pub rabi: f64,
}

impl GeneralParams {
    /// `δ_AB = ω_A - ω_B`.
    pub fn detuning_ab(&self) -> f64 {
        self.charger.detuning - self.battery.detuning
    }

    /// `(r1, r2)`.
    pub fn relative_couplings(&self) -> (f64, f64) {
        let total = self.mu1.hypot(self.mu2);
        (self.mu1 / total, self.mu2 / total)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(Error::Validation(format!("R must be positive, got {}", self.rabi)));
        }
        for drive in [&self.charger, &self.battery] {
            if !drive.detuning.is_finite() {
                return Err(Error::Validation("detuning must be finite".into()));
            }
            validate_drive(drive.mod_amplitude, drive.mod_frequency)?;
        }
        if !(self.mu1.is_finite() && self.mu2.is_finite()) || self.mu1.hypot(self.mu2) == 0.0 {
            return Err(Error::Validation(
                "coupling weights must be finite and not both zero".into(),
            ));
        }
        if self.mu1 < 0.0 || self.mu2 < 0.0 {
            return Err(Error::Validation("coupling weights must be non-negative".into()));
        }
        Ok(())
    }
}
