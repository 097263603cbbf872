//! Blow-up rate fitting, lower-bound verdicts, classification of initial data and
//! Sobolev-ratio monitoring.

mod classify;
mod fit;
mod sobolev;
mod verdict;

pub use classify::{classify_initial_data, Classification};
pub use fit::{fit_rate, FitModel, FitOptions, RateFit, MIN_FIT_SAMPLES};
pub use sobolev::{sobolev_ratio_monitor, SobolevMonitor};
pub use verdict::{check_lower_bound, MassContext, NormKind, Verdict, VerdictStatus, DEFAULT_EXPONENT_TOLERANCE};
