//! Sweep orchestration, configuration, result files and fit metrics.

pub mod config;
pub mod io;
pub mod metrics;
pub mod sweep;

pub use config::{default_currents, log_spaced, parse_currents, SweepConfig};
pub use io::{
    emit_results, load_reference, load_results, parse_reference, parse_results, render_results,
    write_adiabaticity_profile, write_analytic_curve, ResultRow, ResultsFile, RESULTS_HEADER,
};
pub use metrics::{r_squared, ReferenceDataset};
pub use sweep::{run_sweep, simulate_atom, CurrentRow, RSquared, SweepResult};
