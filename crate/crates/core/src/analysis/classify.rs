use serde::Serialize;

use crate::dynamics::hamiltonian;
use crate::error::Result;
use crate::fields::SystemState;
use crate::groundstate::{threshold_window, ThresholdWindow};

/// Where initial data sit relative to the mass window and the sign of `H`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub mass: f64,
    pub window: ThresholdWindow,
    pub in_window: bool,
    pub hamiltonian: f64,
    pub negative_energy: bool,
    /// As declared by the caller; not inferred from the samples.
    pub radial: bool,
    pub note: String,
}

pub fn classify_initial_data(state: &SystemState, eta: f64, q_mass: f64, radial: bool) -> Result<Classification> {
    let q = hamiltonian(state, eta)?;
    let window = threshold_window(eta, q_mass)?;
    let negative_energy = q.hamiltonian < 0.0;
    let position = if q.mass <= window.lower {
        "mass at or below ||Q||^2/(1+eta)"
    } else if q.mass < window.upper {
        "mass inside the window"
    } else {
        "mass at or above ||Q||^2/eta"
    };
    let dichotomy = match (radial, negative_energy) {
        (true, true) => "radial data with H < 0: finite-time blow-up predicted",
        (false, true) => "H < 0 but data not declared radial: the blow-up criterion does not apply",
        (_, false) => "H >= 0: no blow-up prediction from the energy criterion",
    };
    Ok(Classification {
        mass: q.mass,
        window,
        in_window: window.contains(q.mass),
        hamiltonian: q.hamiltonian,
        negative_energy,
        radial,
        note: format!("{position}; {dichotomy}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2D;

    #[test]
    fn zero_state() {
        let st = SystemState::zeros(Grid2D::new(16, 16, 10.0).unwrap());
        let c = classify_initial_data(&st, 1.0, 11.7, true).unwrap();
        assert_eq!(c.mass, 0.0);
        assert_eq!(c.hamiltonian, 0.0);
        assert!(!c.in_window && !c.negative_energy);
        assert!(c.note.contains("below"));
    }
}
