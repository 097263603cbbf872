use rayon::prelude::*;
use serde::Serialize;

use super::{ExplicitSolution, ResolutionWarning};
use crate::dynamics::{hamiltonian, ConservedQuantities};
use crate::error::{MzkError, Result};
use crate::fields::{l2_norm_sq, Grid2D};

/// Norms of the explicit family at one time, each multiplied by `τ = T - t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub t: f64,
    pub tau_grad_e1: f64,
    pub tau_grad_e2: f64,
    pub tau_n: f64,
    pub tau_v: f64,
    pub mass: f64,
    /// `λ(t)·τ`
    pub tau_lambda: f64,
    /// `H·τ²`
    pub tau2_hamiltonian: f64,
    /// `‖∇E‖/‖n‖`
    pub sobolev_ratio: f64,
}

impl ScalingRow {
    pub const CSV_HEADER: [&'static str; 5] = ["t", "tau_grad_e1", "tau_grad_e2", "tau_n", "tau_v"];

    pub fn csv_values(&self) -> [f64; 5] {
        [self.t, self.tau_grad_e1, self.tau_grad_e2, self.tau_n, self.tau_v]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// `max/min - 1` of the four τ-scaled columns.
    pub spreads: [f64; 4],
    pub mass_spread: f64,
    pub lambda_spread: f64,
    pub hamiltonian_spread: f64,
    pub sobolev_ratio_spread: f64,
    /// `max |‖∇E1‖/‖∇E2‖ - 1|`.
    pub grad_ratio_defect: f64,
    pub warnings: Vec<(f64, String)>,
}

/// `max/min - 1` for positive data, `|max - min| / max|x|` otherwise.
pub fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min - 1.0
    } else {
        let scale = max.abs().max(min.abs());
        if scale == 0.0 {
            0.0
        } else {
            (max - min) / scale
        }
    }
}

/// Evaluate the explicit family at each time and tabulate the τ-scaled norms.
pub fn scaling_check(sol: &ExplicitSolution, times: &[f64], grid: Grid2D) -> Result<ScalingReport> {
    if times.is_empty() {
        return Err(MzkError::Contract("scaling check needs at least one time".into()));
    }
    let eta = sol.eta();
    let evaluated: Vec<(ScalingRow, Vec<ResolutionWarning>)> = times
        .par_iter()
        .map(|&t| {
            let (state, warnings) = sol.evaluate_checked(t, grid)?;
            let q: ConservedQuantities = hamiltonian(&state, eta)?;
            let tau = sol.t_blow - t;
            let v_sq = l2_norm_sq(&state.v.vx) + l2_norm_sq(&state.v.vy);
            let row = ScalingRow {
                t,
                tau_grad_e1: tau * q_grad(&state.e1)?,
                tau_grad_e2: tau * q_grad(&state.e2)?,
                tau_n: tau * q.n_sq.sqrt(),
                tau_v: tau * v_sq.sqrt(),
                mass: q.mass,
                tau_lambda: tau * q.energy_norm_sq().sqrt(),
                tau2_hamiltonian: tau * tau * q.hamiltonian,
                sobolev_ratio: q.grad_e_sq.sqrt() / q.n_sq.sqrt(),
            };
            Ok((row, warnings))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ScalingRow> = evaluated.iter().map(|(r, _)| *r).collect();
    let warnings = evaluated
        .iter()
        .flat_map(|(r, w)| w.iter().map(move |w| (r.t, w.to_string())))
        .collect();
    let col = |f: fn(&ScalingRow) -> f64| spread(&rows.iter().map(f).collect::<Vec<_>>());
    Ok(ScalingReport {
        spreads: [
            col(|r| r.tau_grad_e1),
            col(|r| r.tau_grad_e2),
            col(|r| r.tau_n),
            col(|r| r.tau_v),
        ],
        mass_spread: col(|r| r.mass),
        lambda_spread: col(|r| r.tau_lambda),
        hamiltonian_spread: col(|r| r.tau2_hamiltonian),
        sobolev_ratio_spread: col(|r| r.sobolev_ratio),
        grad_ratio_defect: rows
            .iter()
            .map(|r| (r.tau_grad_e1 / r.tau_grad_e2 - 1.0).abs())
            .fold(0.0, f64::max),
        rows,
        warnings,
    })
}

fn q_grad(f: &crate::fields::ComplexField2D) -> Result<f64> {
    Ok(crate::fields::gradient_norm_sq(f)?.sqrt())
}
