//! Charging dynamics and extractable work of a frequency-modulated quantum
//! battery.
//!
//! A charger qubit A and a battery qubit B share a lossy cavity with a
//! Lorentzian spectral density. Both qubit frequencies can be modulated
//! sinusoidally. Starting from a single excitation in the charger, the crate
//! computes how much energy reaches the battery and how much of it is
//! extractable as work (ergotropy). All rates and times are measured in
//! units of the cavity loss rate λ.
//!
//! * [`ergotropy`]: passive states and ergotropy of arbitrary finite states.
//! * [`dynamics`]: the memory kernel and the amplitude solvers.
//! * [`observables`]: stored energy, ergotropy ratio and charging summaries.
//! * [`oracle`]: independent reference computations for cross-checks.

// Negated comparisons reject NaN on purpose; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bessel;
pub mod dynamics;
pub mod ergotropy;
pub mod error;
pub mod observables;
pub mod oracle;

pub use dynamics::{
    amplitudes_from_survival, decoherence_free_check, jacobi_anger_phase, kernel, solve_general,
    solve_survival, solve_survival_quadrature, GeneralParams, ModelParams, QubitDrive,
    SolverConfig, Trajectory,
};
pub use ergotropy::{
    ergotropy, ergotropy_qubit_diagonal, passive_state, spectral_sort, ErgotropyResult,
    HamiltonianSpec, QuantumState,
};
pub use error::{Error, Result};
pub use observables::{
    observable_series, reduced_states, summarize, ChargingSummary, ObservableSeries,
};

#[doc(hidden)]
pub mod fault {
    //! Deliberate fault injection for exercising the validation suite.
    use crate::dynamics::{ModelParams, SolverConfig, Trajectory};
    use crate::error::Result;

    /// [`crate::solve_survival`] with the sign of the memory term flipped.
    pub fn solve_survival_flipped(params: &ModelParams, cfg: &SolverConfig) -> Result<Trajectory> {
        crate::dynamics::solve_survival_with_sign(params, cfg, 1.0)
    }
}
