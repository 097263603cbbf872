use serde::Serialize;

use crate::dynamics::Diagnostics;

/// The ratio `‖∇E‖/‖n‖` along a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevMonitor {
    /// `(t, ‖∇E‖/‖n‖)`
    pub series: Vec<(f64, f64)>,
    /// Times at which `‖n‖ = 0` and the ratio is undefined.
    pub skipped: Vec<f64>,
    /// Bracket of the ratio over the final quarter of the run (by sample count).
    pub final_quarter: Option<(f64, f64)>,
}

pub fn sobolev_ratio_monitor(diagnostics: &[Diagnostics]) -> SobolevMonitor {
    let mut series = Vec::new();
    let mut skipped = Vec::new();
    for d in diagnostics {
        if d.n_norm > 0.0 {
            series.push((d.t, d.grad_e / d.n_norm));
        } else {
            skipped.push(d.t);
        }
    }
    let final_quarter = if series.is_empty() {
        None
    } else {
        let start = series.len() - series.len().div_ceil(4);
        let tail = &series[start..];
        Some(tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| {
            (lo.min(r), hi.max(r))
        }))
    };
    SobolevMonitor {
        series,
        skipped,
        final_quarter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(t: f64, grad_e: f64, n_norm: f64) -> Diagnostics {
        Diagnostics {
            t,
            dt: 0.1,
            mass: 1.0,
            hamiltonian: 0.0,
            grad_e,
            n_norm,
            v_norm: 0.0,
            lambda: 1.0,
            dealias_fraction_energy: 1.0,
        }
    }

    #[test]
    fn zero_n_is_flagged() {
        let m = sobolev_ratio_monitor(&[diag(0.0, 1.0, 0.0), diag(1.0, 2.0, 0.0)]);
        assert!(m.series.is_empty());
        assert_eq!(m.skipped, vec![0.0, 1.0]);
        assert_eq!(m.final_quarter, None);
    }

    #[test]
    fn final_quarter_bracket() {
        let d: Vec<_> = (0..8).map(|i| diag(i as f64, 1.0 + i as f64, 1.0)).collect();
        let m = sobolev_ratio_monitor(&d);
        assert_eq!(m.final_quarter, Some((7.0, 8.0)));
    }
}
