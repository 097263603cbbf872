//! Numerical laboratory for the two-dimensional magnetic Zakharov system
//!
//! ```text
//! i E1_t + ΔE1 - n E1 + η E2 (E1 Ē2 - Ē1 E2) = 0
//! i E2_t + ΔE2 - n E2 + η E1 (Ē1 E2 - E1 Ē2) = 0
//! n_t + ∇·v = 0
//! v_t + ∇n + ∇(|E1|² + |E2|²) = 0
//! ```
//!
//! on a periodic box approximating ℝ². The crate is organised by capability:
//!
//! * [`fields`]: grids, field containers, spectral derivatives, norms, checkpoints.
//! * [`groundstate`]: the Townes profile Q, Pohozaev and Gagliardo–Nirenberg checks,
//!   and the mass window `‖Q‖²/(1+η) < M < ‖Q‖²/η`.
//! * [`dynamics`]: conserved quantities, the Strang-split integrator and PDE residuals.
//! * [`selfsimilar`]: the explicit self-similar blow-up family and its profile system.
//! * [`rescale`]: the energy-normalising space-time rescaling and its identities.
//! * [`analysis`]: `c/(T-t)^p` rate fits, lower-bound verdicts, data classification.
//! * [`cli`]: flat config files, output writers and the `mzk` subcommands.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod groundstate;
pub mod output;
pub mod rescale;
pub mod selfsimilar;

pub use error::{MzkError, Result};
pub use num_complex::Complex64;
