//! Sweep harness for the `qbattery` simulator: TOML sweep documents, built-in
//! presets, parallel sweeps with deterministic CSV output, and the oracle
//! validation suite.

pub mod config;
pub mod error;
pub mod presets;
pub mod sweep;
pub mod validate;

pub use config::{load_config, parse_config, SweepSpec};
pub use error::{CliError, CliResult};
pub use sweep::{run_sweep, simulate, RunRecord, SweepOptions};
pub use validate::{validate, CheckOutcome, Fault, ValidateOptions};
