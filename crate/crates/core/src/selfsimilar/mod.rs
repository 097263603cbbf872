//! Profile solver, explicit self-similar blow-up family and its scaling checks.

mod band;
mod explicit;
mod profile;
mod scaling;

pub use band::BandMatrix;
pub use explicit::{ExplicitSolution, ResolutionWarning, MAX_EDGE_RATIO, MIN_SAMPLES_PER_WIDTH};
pub use profile::{limit_profile, profile_residuals, seeded_profile, solve_profile, ProfilePair};
pub use scaling::{scaling_check, spread, ScalingReport, ScalingRow};

