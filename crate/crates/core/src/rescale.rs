//! The energy-norm rescaling
//!
//! ```text
//! Ẽj(s, y) = λ⁻¹ Ej(t + s/λ, y/λ),  ñ = λ⁻² n(t + s/λ, y/λ),  ṽ = λ⁻² v(t + s/λ, y/λ)
//! λ² = ‖∇E1‖² + ‖∇E2‖² + ½‖n‖² + ½‖v‖²
//! ```
//!
//! On a periodic grid `y = λx` maps sample `i` to sample `i` of a box of side `λL`,
//! so the transform only rescales values and relabels the box.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{hamiltonian, residual_with_factor, StateDerivative};
use crate::error::{MzkError, Result};
use crate::fields::{ComplexField2D, RealField2D, SystemState, VectorField2D};

/// A transformed snapshot: `state` holds `(Ẽ1, Ẽ2, ñ, ṽ)` with `state.t = s`.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledState {
    pub state: SystemState,
    pub base_t: f64,
    pub s: f64,
    pub lambda: f64,
}

/// `λ` of a state.
pub fn lambda_of(state: &SystemState) -> Result<f64> {
    let lam2 = hamiltonian(state, 0.0)?.energy_norm_sq();
    if !(lam2 > 0.0) {
        return Err(MzkError::Degenerate(
            "energy norm vanishes, the rescaling is undefined".into(),
        ));
    }
    Ok(lam2.sqrt())
}

/// Apply the spatial part of the transform with factor `lam`; the box side becomes `lam·L`.
pub fn rescale_state(state: &SystemState, lam: f64) -> Result<SystemState> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(MzkError::Domain {
            name: "lambda",
            value: lam,
            reason: "scale factor must be finite and > 0",
        });
    }
    let grid = state.grid().scaled(lam)?;
    let a = 1.0 / lam;
    let b = a * a;
    let c = |f: &ComplexField2D| {
        ComplexField2D::from_raw(grid, f.values().iter().map(|z| z * a).collect::<Vec<Complex64>>())
    };
    let r = |f: &RealField2D| RealField2D::from_raw(grid, f.values().iter().map(|x| x * b).collect());
    SystemState::new(
        c(&state.e1),
        c(&state.e2),
        r(&state.n),
        VectorField2D {
            vx: r(&state.v.vx),
            vy: r(&state.v.vy),
        },
        state.t,
    )
}

/// Transform the snapshots `states[base..]` with `λ = λ(states[base].t)`, stamping
/// each with `s = λ (t - t_base)`.
pub fn rescale_window(states: &[SystemState], base: usize) -> Result<Vec<RescaledState>> {
    let origin = states
        .get(base)
        .ok_or_else(|| MzkError::Contract(format!("base index {base} outside a window of {}", states.len())))?;
    let lambda = lambda_of(origin)?;
    states[base..]
        .par_iter()
        .map(|st| {
            if st.t < origin.t {
                return Err(MzkError::Contract("snapshots must be ordered in time".into()));
            }
            let s = lambda * (st.t - origin.t);
            let mut state = rescale_state(st, lambda)?;
            state.t = s;
            Ok(RescaledState {
                state,
                base_t: origin.t,
                s,
                lambda,
            })
        })
        .collect()
}

/// Residual norms of the rescaled system (with the `1/λ` factor on `i∂s`) at each
/// interior snapshot, `∂s` taken by centred differences.
pub fn rescaled_residual(window: &[RescaledState], eta: f64) -> Result<Vec<[f64; 4]>> {
    if window.len() < 3 {
        return Err(MzkError::Contract("rescaled residual needs at least three snapshots".into()));
    }
    let (lambda, base_t) = (window[0].lambda, window[0].base_t);
    if window
        .iter()
        .any(|w| w.lambda.to_bits() != lambda.to_bits() || w.base_t.to_bits() != base_t.to_bits())
    {
        return Err(MzkError::Contract("snapshots were rescaled with different lambda or base time".into()));
    }
    window
        .par_windows(3)
        .map(|w| {
            let ds = StateDerivative::centered(&w[0].state, &w[1].state, &w[2].state)?;
            Ok(residual_with_factor(&w[1].state, &ds, eta, 1.0 / lambda)?.l2_norms())
        })
        .collect()
}

/// Identity defects of one snapshot transformed with its own `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub t: f64,
    pub lambda: f64,
    /// `|‖∇Ẽ‖² + ½‖ñ‖² + ½‖ṽ‖² - 1|`
    pub identity_2_5_defect: f64,
    /// `|M̃ - M₀| / M₀` against the first snapshot's mass.
    pub mass_defect: f64,
    /// `|H̃ - H/λ²| / |H/λ²|`
    pub hamiltonian_scaling_defect: f64,
    /// `|H - H₀| / |H₀|`, the integrator's drift (not an identity defect).
    pub hamiltonian_drift: f64,
}

impl IdentityRow {
    pub const CSV_HEADER: [&'static str; 5] = [
        "t",
        "lambda",
        "identity_2_5_defect",
        "mass_defect",
        "hamiltonian_scaling_defect",
    ];

    pub fn csv_values(&self) -> [f64; 5] {
        [
            self.t,
            self.lambda,
            self.identity_2_5_defect,
            self.mass_defect,
            self.hamiltonian_scaling_defect,
        ]
    }
}

fn relative(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Identity defects for every snapshot of a trajectory.
pub fn identity_rows(states: &[SystemState], eta: f64) -> Result<Vec<IdentityRow>> {
    let first = states
        .first()
        .ok_or_else(|| MzkError::Contract("no snapshots to check".into()))?;
    let q0 = hamiltonian(first, eta)?;
    states
        .par_iter()
        .map(|st| {
            let q = hamiltonian(st, eta)?;
            let lambda = q.energy_norm_sq().sqrt();
            if !(lambda > 0.0) {
                return Err(MzkError::Degenerate(format!("zero energy norm at t = {}", st.t)));
            }
            let qt = hamiltonian(&rescale_state(st, lambda)?, eta)?;
            Ok(IdentityRow {
                t: st.t,
                lambda,
                identity_2_5_defect: (qt.energy_norm_sq() - 1.0).abs(),
                mass_defect: relative(qt.mass, q0.mass),
                hamiltonian_scaling_defect: relative(qt.hamiltonian, q.hamiltonian / (lambda * lambda)),
                hamiltonian_drift: relative(q.hamiltonian, q0.hamiltonian),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::mass;
    use crate::fields::Grid2D;

    fn bump() -> SystemState {
        let g = Grid2D::new(32, 32, 12.0).unwrap();
        let e1 = ComplexField2D::from_fn(g, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.3 * x * (-(x * x + y * y)).exp()));
        let e2 = e1.map(|z| Complex64::new(0.0, -0.5) * z);
        let n = RealField2D::from_fn(g, |x, y| -0.4 * (-(x * x + y * y) / 3.0).exp());
        let v = VectorField2D::new(
            RealField2D::from_fn(g, |x, y| 0.1 * y * (-(x * x + y * y)).exp()),
            RealField2D::from_fn(g, |x, y| -0.2 * x * (-(x * x + y * y)).exp()),
        )
        .unwrap();
        SystemState::new(e1, e2, n, v, 0.0).unwrap()
    }

    #[test]
    fn own_lambda_normalises_energy() {
        let st = bump();
        let lam = lambda_of(&st).unwrap();
        let r = rescale_state(&st, lam).unwrap();
        assert!((lambda_of(&r).unwrap() - 1.0).abs() < 1e-12);
        assert!((mass(&r).unwrap() / mass(&st).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn unit_factor_is_identity() {
        let st = bump();
        assert_eq!(rescale_state(&st, 1.0).unwrap(), st);
    }

    #[test]
    fn composition() {
        let st = bump();
        let ab = rescale_state(&st, 6.0).unwrap();
        let a_b = rescale_state(&rescale_state(&st, 2.0).unwrap(), 3.0).unwrap();
        for (x, y) in ab.e1.values().iter().zip(a_b.e1.values()) {
            assert!((x - y).norm() < 1e-15);
        }
        assert!((ab.grid().side() - a_b.grid().side()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_is_degenerate() {
        let st = SystemState::zeros(Grid2D::new(8, 8, 1.0).unwrap());
        assert!(matches!(lambda_of(&st), Err(MzkError::Degenerate(_))));
        assert!(matches!(rescale_state(&st, 0.0), Err(MzkError::Domain { .. })));
    }

    #[test]
    fn sqrt2_lambda_example() {
        let g = Grid2D::new(16, 16, 2.0 * std::f64::consts::PI).unwrap();
        // ‖∇E1‖² = ‖∇E2‖² = 0.5 and ‖n‖² = ‖v‖² = 1
        let area = g.side() * g.side();
        let a = (0.5 / area).sqrt();
        let e1 = ComplexField2D::from_fn(g, |x, _| Complex64::from_polar(a, x));
        let e2 = e1.clone();
        let c = (1.0 / area).sqrt();
        let n = RealField2D::from_fn(g, |_, _| c);
        let v = VectorField2D::new(RealField2D::from_fn(g, |_, _| c), RealField2D::zeros(g)).unwrap();
        let st = SystemState::new(e1, e2, n, v, 0.0).unwrap();
        assert!((lambda_of(&st).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }
}
