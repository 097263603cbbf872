use serde::Serialize;

use super::conserved::Diagnostics;
use super::stepper::{step_with_report, StepReport, StepperConfig};
use crate::error::{MzkError, Result};
use crate::fields::SystemState;

/// Resolution threshold: a run stops once the dealiasing band holds less than
/// this share of `‖∇E‖²`.
pub const BAND_ENERGY_THRESHOLD: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Horizon,
    LambdaCap,
    /// Band-energy criterion tripped; the final state is still finite.
    ResolutionLoss,
    /// A step produced NaN/inf; the final state is the last finite one.
    NonFinite,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Store a checkpoint whenever `t` crosses a multiple of this interval
    /// (the initial state is always stored when set).
    pub checkpoint_interval: Option<f64>,
    /// Keep every step's coupling bookkeeping.
    pub keep_step_reports: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub diagnostics: Vec<Diagnostics>,
    pub checkpoints: Vec<SystemState>,
    pub step_reports: Vec<StepReport>,
    pub final_state: SystemState,
    pub stop_reason: StopReason,
}

impl Trajectory {
    pub fn initial_lambda(&self) -> f64 {
        self.diagnostics[0].lambda
    }

    pub fn max_lambda(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.lambda).fold(0.0, f64::max)
    }

    /// `(t, y)` pairs for a diagnostics column picked by `f`.
    pub fn series(&self, f: impl Fn(&Diagnostics) -> f64) -> Vec<(f64, f64)> {
        self.diagnostics.iter().map(|d| (d.t, f(d))).collect()
    }
}

/// Integrate to `horizon` (or until `λ` passes the cap / resolution is lost).
pub fn run(initial: &SystemState, config: &StepperConfig, horizon: f64) -> Result<Trajectory> {
    run_with_options(initial, config, horizon, &RunOptions::default())
}

pub fn run_with_options(
    initial: &SystemState,
    config: &StepperConfig,
    horizon: f64,
    options: &RunOptions,
) -> Result<Trajectory> {
    config.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(MzkError::Domain {
            name: "horizon",
            value: horizon,
            reason: "must be > 0",
        });
    }
    initial.check_finite()?;
    let t_end = initial.t + horizon;
    let first = Diagnostics::of(initial, config.eta, 0.0)?;
    let lambda0 = first.lambda;
    let mass0 = first.mass;
    let mut diagnostics = vec![first];
    let mut checkpoints = Vec::new();
    let mut step_reports = Vec::new();
    let mut next_checkpoint = f64::INFINITY;
    if let Some(every) = options.checkpoint_interval {
        if !(every > 0.0) {
            return Err(MzkError::Domain {
                name: "checkpoint_interval",
                value: every,
                reason: "must be > 0",
            });
        }
        checkpoints.push(initial.clone());
        next_checkpoint = initial.t + every;
    }

    let mut state = initial.clone();
    let mut stop_reason = StopReason::Horizon;
    let mut lambda = lambda0;
    // Small tolerance so round-off in t does not trigger a sliver step.
    while state.t < t_end - 1e-12 * t_end.abs().max(1.0) {
        let mut cfg = *config;
        if config.adaptive && lambda0 > 0.0 && lambda > 0.0 {
            cfg.dt = config.dt * (lambda0 / lambda).powi(2).min(1.0);
        }
        cfg.dt = cfg.dt.min(t_end - state.t);
        let (next, report) = match step_with_report(&state, &cfg) {
            Ok(x) => x,
            Err(MzkError::BlowUpReached { .. }) => {
                stop_reason = StopReason::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        };
        let d = Diagnostics::of(&next, config.eta, cfg.dt)?;
        if mass0 > 0.0 && (d.mass - mass0).abs() / mass0 > config.drift_tolerance {
            return Err(MzkError::Accuracy {
                quantity: "cumulative mass",
                drift: (d.mass - mass0).abs() / mass0,
                tolerance: config.drift_tolerance,
            });
        }
        lambda = d.lambda;
        state = next;
        diagnostics.push(d);
        if options.keep_step_reports {
            step_reports.push(report);
        }
        if let Some(every) = options.checkpoint_interval {
            if state.t >= next_checkpoint - 1e-12 * every {
                checkpoints.push(state.clone());
                while next_checkpoint <= state.t + 1e-12 * every {
                    next_checkpoint += every;
                }
            }
        }
        if d.dealias_fraction_energy < BAND_ENERGY_THRESHOLD {
            stop_reason = StopReason::ResolutionLoss;
            break;
        }
        if lambda > config.lambda_cap {
            stop_reason = StopReason::LambdaCap;
            break;
        }
    }
    Ok(Trajectory {
        diagnostics,
        checkpoints,
        step_reports,
        final_state: state,
        stop_reason,
    })
}
