//! Radial ground state `Q` of `-ΔQ + Q = Q³`, the Pohozaev identities, the sharp
//! Gagliardo–Nirenberg inequality and the mass window it induces.

mod ode;
mod radial;
mod shooting;

use std::sync::OnceLock;

use serde::Serialize;

pub use ode::{bessel_k0_k1, Advance, Dopri5};
pub use radial::{fd_derivatives, radial_integral, radial_laplacian, RadialProfile};
pub use shooting::solve_q;

use crate::error::{MzkError, Result};
use crate::fields::{gradient_norm_sq, l2_norm_sq, l4_norm_4, ComplexField2D};

/// Radius, sample count and bisection tolerance of the shared reference profile.
pub const REFERENCE_R_MAX: f64 = 20.0;
pub const REFERENCE_POINTS: usize = 4001;
pub const REFERENCE_TOL: f64 = 1e-12;

/// Shared ground state computed once per process with the reference settings.
pub fn reference_q() -> &'static RadialProfile {
    static Q: OnceLock<RadialProfile> = OnceLock::new();
    Q.get_or_init(|| {
        solve_q(REFERENCE_R_MAX, REFERENCE_POINTS, REFERENCE_TOL)
            .expect("reference ground state must converge")
    })
}

/// `‖Q‖²_{L²(ℝ²)}` of the reference profile.
pub fn reference_q_mass() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| reference_q().mass())
}

/// Max-norm residual of `Q'' + Q'/r - Q + Q³` over all but the outermost sample.
///
/// `Q''` is obtained by differentiating the stored slopes (odd in `r`).
pub fn ode_residual(q: &RadialProfile) -> f64 {
    let h = q.step();
    (0..q.len() - 1)
        .map(|i| {
            let qpp = odd_derivative_at(&q.slopes, h, i);
            // Q'/r → Q''(0) at the origin
            let lap = if i == 0 { 2.0 * qpp } else { qpp + q.slopes[i] / q.r[i] };
            let f = q.values[i];
            (lap - f + f * f * f).abs()
        })
        .fold(0.0, f64::max)
}

/// Fourth-order central derivative of odd-parity samples at index `i`.
fn odd_derivative_at(s: &[f64], h: f64, i: usize) -> f64 {
    let at = |k: isize| -> f64 {
        if k < 0 {
            -s[(-k) as usize]
        } else {
            s[k as usize]
        }
    };
    let k = i as isize;
    if i + 2 < s.len() {
        (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h)
    } else {
        (at(k + 1) - at(k - 1)) / (2.0 * h)
    }
}

/// Relative Pohozaev defects of a candidate ground state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PohozaevDefects {
    /// `|∫Q² - ½∫Q⁴| / ∫Q²`
    pub mass: f64,
    /// `|∫|∇Q|² - ½∫Q⁴| / ∫|∇Q|²`
    pub gradient: f64,
    /// Set for the zero profile, where both defects are defined as 0.
    pub degenerate: bool,
}

pub fn pohozaev_check(q: &RadialProfile) -> PohozaevDefects {
    let m = q.mass();
    let g = q.grad_norm_sq();
    let half_l4 = 0.5 * q.l4_norm_4();
    if m == 0.0 || g == 0.0 {
        return PohozaevDefects {
            mass: 0.0,
            gradient: 0.0,
            degenerate: true,
        };
    }
    PohozaevDefects {
        mass: (m - half_l4).abs() / m,
        gradient: (g - half_l4).abs() / g,
        degenerate: false,
    }
}

/// Both sides of `½‖u‖⁴₄ ≤ (‖u‖²₂/‖Q‖²₂)‖∇u‖²₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GnCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn gn_check(u: &ComplexField2D, q_mass: f64) -> Result<GnCheck> {
    if !(q_mass > 0.0 && q_mass.is_finite()) {
        return Err(MzkError::Domain {
            name: "Q_mass",
            value: q_mass,
            reason: "must be > 0",
        });
    }
    let lhs = 0.5 * l4_norm_4(u)?;
    let rhs = l2_norm_sq(u) / q_mass * gradient_norm_sq(u)?;
    Ok(GnCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Mass window `(‖Q‖²/(1+η), ‖Q‖²/η)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdWindow {
    pub eta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ThresholdWindow {
    pub fn contains(&self, mass: f64) -> bool {
        self.lower < mass && mass < self.upper
    }
}

pub fn threshold_window(eta: f64, q_mass: f64) -> Result<ThresholdWindow> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(MzkError::Domain {
            name: "eta",
            value: eta,
            reason: "coupling must be > 0",
        });
    }
    if !(q_mass > 0.0 && q_mass.is_finite()) {
        return Err(MzkError::Domain {
            name: "Q_mass",
            value: q_mass,
            reason: "must be > 0",
        });
    }
    Ok(ThresholdWindow {
        eta,
        lower: q_mass / (1.0 + eta),
        upper: q_mass / eta,
    })
}

/// Scalar summary of a ground-state solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroundStateSummary {
    #[serde(rename = "Q0")]
    pub q0: f64,
    pub mass: f64,
    pub grad_norm_sq: f64,
    pub pohozaev_defects: [f64; 2],
    pub ode_residual: f64,
    pub tail_ratio: f64,
    pub decay_rate: f64,
}

impl GroundStateSummary {
    pub fn of(q: &RadialProfile) -> Self {
        let p = pohozaev_check(q);
        Self {
            q0: q.value_at_origin(),
            mass: q.mass(),
            grad_norm_sq: q.grad_norm_sq(),
            pohozaev_defects: [p.mass, p.gradient],
            ode_residual: ode_residual(q),
            tail_ratio: q.tail_ratio(),
            decay_rate: q.decay_rate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_window_examples() {
        let w = threshold_window(1.0, 2.0).unwrap();
        assert_eq!((w.lower, w.upper), (1.0, 2.0));
        let w = threshold_window(1.0, 11.70).unwrap();
        assert!((w.lower - 5.85).abs() < 1e-12 && (w.upper - 11.70).abs() < 1e-12);
        assert!(matches!(threshold_window(0.0, 2.0), Err(MzkError::Domain { name: "eta", .. })));
        assert!(threshold_window(-1.0, 2.0).is_err());
    }

    #[test]
    fn threshold_window_is_monotone_and_nonempty() {
        let mut prev = threshold_window(1e-3, 11.7).unwrap();
        for k in 1..200 {
            let eta = 1e-3 * 1.1f64.powi(k);
            let w = threshold_window(eta, 11.7).unwrap();
            assert!(w.lower < w.upper);
            assert!(w.lower < prev.lower && w.upper < prev.upper);
            prev = w;
        }
    }

    #[test]
    fn pohozaev_flags_zero_profile() {
        let r: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let z = RadialProfile::new(r, vec![0.0; 10], vec![0.0; 10], 1.0).unwrap();
        let p = pohozaev_check(&z);
        assert!(p.degenerate && p.mass == 0.0 && p.gradient == 0.0);
    }
}
