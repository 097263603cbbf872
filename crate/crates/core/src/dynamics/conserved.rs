use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::fields::{band_energy_fraction, gradient_norm_sq, l2_norm_sq, SystemState};

/// Mass and the five Hamiltonian contributions of a state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConservedQuantities {
    pub mass: f64,
    pub hamiltonian: f64,
    /// `‖∇E1‖² + ‖∇E2‖²`
    pub grad_e_sq: f64,
    /// `‖n‖²`
    pub n_sq: f64,
    /// `‖v‖²`
    pub v_sq: f64,
    /// `∫ n(|E1|² + |E2|²)`
    pub cross_term: f64,
    /// `-(η/2) ∫ |E1Ē2 - E2Ē1|²`
    pub magnetic_term: f64,
}

impl ConservedQuantities {
    /// `λ² = ‖∇E1‖² + ‖∇E2‖² + ½‖n‖² + ½‖v‖²`.
    pub fn energy_norm_sq(&self) -> f64 {
        self.grad_e_sq + 0.5 * self.n_sq + 0.5 * self.v_sq
    }

    /// Sum of the five contributions.
    pub fn reconstructed_hamiltonian(&self) -> f64 {
        self.grad_e_sq + 0.5 * self.n_sq + 0.5 * self.v_sq + self.cross_term + self.magnetic_term
    }
}

/// `‖E1‖² + ‖E2‖²`.
pub fn mass(state: &SystemState) -> Result<f64> {
    state.check_finite()?;
    Ok(l2_norm_sq(&state.e1) + l2_norm_sq(&state.e2))
}

/// Evaluate the Hamiltonian with spectral gradients and trapezoidal quadrature.
pub fn hamiltonian(state: &SystemState, eta: f64) -> Result<ConservedQuantities> {
    state.check_finite()?;
    let w = state.grid().cell_area();
    let grad_e_sq = gradient_norm_sq(&state.e1)? + gradient_norm_sq(&state.e2)?;
    let n_sq = l2_norm_sq(&state.n);
    let v_sq = state.v.l2_norm_sq();
    let mut mass = 0.0;
    let mut cross = 0.0;
    let mut mag = 0.0;
    for ((a, b), n) in state
        .e1
        .values()
        .iter()
        .zip(state.e2.values())
        .zip(state.n.values())
    {
        let rho = a.norm_sqr() + b.norm_sqr();
        mass += rho;
        cross += n * rho;
        // E1Ē2 - E2Ē1 = 2i Im(E1Ē2)
        let m: Complex64 = a * b.conj() - b * a.conj();
        mag += m.norm_sqr();
    }
    let cross_term = w * cross;
    let magnetic_term = -0.5 * eta * w * mag;
    let hamiltonian = grad_e_sq + 0.5 * n_sq + 0.5 * v_sq + cross_term + magnetic_term;
    Ok(ConservedQuantities {
        mass: w * mass,
        hamiltonian,
        grad_e_sq,
        n_sq,
        v_sq,
        cross_term,
        magnetic_term,
    })
}

/// One row of the diagnostics table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    /// `(‖∇E1‖² + ‖∇E2‖²)^{1/2}`
    pub grad_e: f64,
    pub n_norm: f64,
    pub v_norm: f64,
    pub lambda: f64,
    /// Share of `‖∇E‖²` held inside the dealiasing band.
    pub dealias_fraction_energy: f64,
}

impl Diagnostics {
    pub const CSV_HEADER: [&'static str; 9] = [
        "t",
        "dt",
        "mass",
        "hamiltonian",
        "grad_E",
        "n_norm",
        "v_norm",
        "lambda",
        "dealias_fraction_energy",
    ];

    pub fn of(state: &SystemState, eta: f64, dt: f64) -> Result<Self> {
        let q = hamiltonian(state, eta)?;
        Ok(Self {
            t: state.t,
            dt,
            mass: q.mass,
            hamiltonian: q.hamiltonian,
            grad_e: q.grad_e_sq.sqrt(),
            n_norm: q.n_sq.sqrt(),
            v_norm: q.v_sq.sqrt(),
            lambda: q.energy_norm_sq().sqrt(),
            dealias_fraction_energy: band_energy_fraction(&[&state.e1, &state.e2]),
        })
    }

    pub fn as_row(&self) -> [f64; 9] {
        [
            self.t,
            self.dt,
            self.mass,
            self.hamiltonian,
            self.grad_e,
            self.n_norm,
            self.v_norm,
            self.lambda,
            self.dealias_fraction_energy,
        ]
    }

    pub fn from_row(row: &[f64]) -> Option<Self> {
        let r: [f64; 9] = row.try_into().ok()?;
        Some(Self {
            t: r[0],
            dt: r[1],
            mass: r[2],
            hamiltonian: r[3],
            grad_e: r[4],
            n_norm: r[5],
            v_norm: r[6],
            lambda: r[7],
            dealias_fraction_energy: r[8],
        })
    }
}
