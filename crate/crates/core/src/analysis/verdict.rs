use serde::Serialize;

use super::RateFit;
use crate::error::Result;

/// Which norm a fitted series measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `(‖∇E1‖² + ‖∇E2‖²)^{1/2}`
    GradE,
    /// `‖n‖`
    NNorm,
    /// `λ`, the full energy norm
    FullNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    NotBlowingUp,
}

/// Mass data needed to report the empirical constant `c·(M - ‖Q‖²/(1+η))^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassContext {
    pub mass: f64,
    pub q_mass: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub which: NormKind,
    pub status: VerdictStatus,
    pub exponent: Option<f64>,
    pub tolerance: f64,
    /// Exponent above `1 + tolerance`.
    pub super_rate: bool,
    /// Reported only; the optimal lower-bound constant is not known numerically.
    pub empirical_constant: Option<f64>,
    pub note: String,
}

pub const DEFAULT_EXPONENT_TOLERANCE: f64 = 0.05;

impl std::fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictStatus::Pass => "pass",
            VerdictStatus::Fail => "fail",
            VerdictStatus::NotBlowingUp => "not blowing up",
        })
    }
}

/// Judge a fit against the `1/(T - t)` lower bound: the exponent must be at least
/// `1 - tolerance`. A failed fit becomes "not blowing up".
pub fn check_lower_bound(
    fit: &Result<RateFit>,
    which: NormKind,
    mass: Option<MassContext>,
    tolerance: f64,
) -> Verdict {
    let fit = match fit {
        Ok(f) => f,
        Err(e) => {
            return Verdict {
                which,
                status: VerdictStatus::NotBlowingUp,
                exponent: None,
                tolerance,
                super_rate: false,
                empirical_constant: None,
                note: e.to_string(),
            }
        }
    };
    let status = if fit.exponent >= 1.0 - tolerance {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    };
    let super_rate = fit.exponent > 1.0 + tolerance;
    let empirical_constant = match (which, mass) {
        (NormKind::GradE | NormKind::FullNorm, Some(m)) => {
            let excess = m.mass - m.q_mass / (1.0 + m.eta);
            (excess > 0.0).then(|| fit.c * excess.sqrt())
        }
        _ => None,
    };
    let note = match (status, super_rate) {
        (VerdictStatus::Pass, true) => "super-rate: growth faster than 1/(T-t)".to_string(),
        (VerdictStatus::Pass, false) => "growth at the 1/(T-t) rate".to_string(),
        _ => format!("exponent {} below the lower bound 1", fit.exponent),
    };
    Verdict {
        which,
        status,
        exponent: Some(fit.exponent),
        tolerance,
        super_rate,
        empirical_constant,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MzkError;

    fn fit(exponent: f64) -> Result<RateFit> {
        Ok(RateFit {
            c: 2.0,
            t_est: 1.0,
            exponent,
            rms_log_residual: 0.0,
            samples: 10,
        })
    }

    #[test]
    fn statuses() {
        let v = check_lower_bound(&fit(1.0), NormKind::NNorm, None, 0.01);
        assert_eq!(v.status, VerdictStatus::Pass);
        assert!(!v.super_rate);
        let v = check_lower_bound(&fit(2.0), NormKind::NNorm, None, 0.01);
        assert_eq!(v.status, VerdictStatus::Pass);
        assert!(v.super_rate && v.note.contains("super-rate"));
        let v = check_lower_bound(&fit(0.5), NormKind::NNorm, None, 0.01);
        assert_eq!(v.status, VerdictStatus::Fail);
        let v = check_lower_bound(&Err(MzkError::FitFailure("x".into())), NormKind::GradE, None, 0.01);
        assert_eq!(v.status, VerdictStatus::NotBlowingUp);
        assert_eq!(v.status.to_string(), "not blowing up");
    }

    #[test]
    fn empirical_constant() {
        let m = MassContext { mass: 7.0, q_mass: 10.0, eta: 1.0 };
        let v = check_lower_bound(&fit(1.0), NormKind::GradE, Some(m), 0.01);
        assert!((v.empirical_constant.unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(check_lower_bound(&fit(1.0), NormKind::NNorm, Some(m), 0.01).empirical_constant, None);
    }
}
