//! Time integration by Strang splitting, conserved quantities and PDE residuals.

mod conserved;
mod residual;
mod run;
mod stepper;

pub use conserved::{hamiltonian, mass, ConservedQuantities, Diagnostics};
pub use residual::{residual, residual_centered, residual_with_factor, Residual, StateDerivative};
pub use run::{run, run_with_options, RunOptions, StopReason, Trajectory, BAND_ENERGY_THRESHOLD};
pub use stepper::{step, step_with_report, NonlinearScheme, StepReport, StepperConfig};

