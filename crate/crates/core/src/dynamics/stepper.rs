//! Strang splitting: exact linear Schrödinger and wave flows around a pointwise
//! coupling flow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MzkError, Result};
use crate::fields::{spectral, ComplexField2D, RealField2D, SystemState, VectorField2D};

/// How the pointwise coupling substep is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NonlinearScheme {
    /// Closed-form flow: a phase `exp(-i n τ)` and a real rotation of `(E1, E2)` by
    /// `2η Im(E1Ē2) τ`, both exact because `|E1|²+|E2|²` and `Im(E1Ē2)` are frozen.
    Exact,
    /// Classical RK4 on the same pointwise ODE.
    Rk4 { substeps: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub eta: f64,
    /// Shrink `dt` like `(λ(0)/λ(t))²` during [`super::run`].
    pub adaptive: bool,
    /// Stop a run once `λ(t)` exceeds this value.
    pub lambda_cap: f64,
    /// Largest admissible relative mass change per step.
    pub drift_tolerance: f64,
    pub nonlinear: NonlinearScheme,
}

impl StepperConfig {
    pub fn new(dt: f64, eta: f64) -> Self {
        Self {
            dt,
            eta,
            adaptive: false,
            lambda_cap: f64::INFINITY,
            drift_tolerance: 1e-8,
            nonlinear: NonlinearScheme::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(MzkError::Domain {
                name: "dt",
                value: self.dt,
                reason: "time step must be > 0",
            });
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(MzkError::Domain {
                name: "eta",
                value: self.eta,
                reason: "coupling must be > 0",
            });
        }
        if !(self.lambda_cap > 0.0) {
            return Err(MzkError::Domain {
                name: "lambda_cap",
                value: self.lambda_cap,
                reason: "must be > 0",
            });
        }
        if !(self.drift_tolerance > 0.0) {
            return Err(MzkError::Domain {
                name: "drift_tolerance",
                value: self.drift_tolerance,
                reason: "must be > 0",
            });
        }
        if let NonlinearScheme::Rk4 { substeps } = self.nonlinear {
            if substeps < 4 {
                return Err(MzkError::Domain {
                    name: "substeps",
                    value: substeps as f64,
                    reason: "RK4 coupling substep needs >= 4 substeps",
                });
            }
        }
        Ok(())
    }

    /// `dt·max|k|²`, the phase advanced by the fastest Schrödinger mode per step.
    pub fn stiffness(&self, grid: &crate::fields::Grid2D) -> f64 {
        let kx = std::f64::consts::PI * grid.nx() as f64 / grid.side();
        let ky = std::f64::consts::PI * grid.ny() as f64 / grid.side();
        self.dt * (kx * kx + ky * ky)
    }
}

/// Per-step bookkeeping returned by [`step_with_report`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StepReport {
    /// Max-norm change of `|E1|²+|E2|²` across the coupling substep.
    pub density_drift: f64,
    /// Max-norm change of `Im(E1Ē2)` across the coupling substep.
    pub im_product_drift: f64,
    /// Relative mass change over the whole step.
    pub mass_drift: f64,
}

/// Exact flow of `i E_t + ΔE = 0` over `tau` for one field.
pub(crate) fn schrodinger_flow(field: &mut ComplexField2D, tau: f64) {
    let grid = *field.grid();
    let sp = spectral(&grid);
    let data = field.values_mut();
    sp.forward(data);
    data.par_iter_mut().enumerate().for_each(|(i, z)| {
        let phase = -sp.k_sq(i) * tau;
        *z *= Complex64::from_polar(1.0, phase);
    });
    sp.inverse(data);
}

/// Exact flow of `n_t = -∇·v`, `v_t = -∇n` over `tau`.
pub(crate) fn wave_flow(n: &mut RealField2D, v: &mut VectorField2D, tau: f64) {
    let grid = *n.grid();
    let sp = spectral(&grid);
    let nx = grid.nx();
    let to_c = |f: &RealField2D| -> Vec<Complex64> {
        f.values().iter().map(|&x| Complex64::new(x, 0.0)).collect()
    };
    let mut nh = to_c(n);
    let mut vxh = to_c(&v.vx);
    let mut vyh = to_c(&v.vy);
    sp.forward(&mut nh);
    sp.forward(&mut vxh);
    sp.forward(&mut vyh);
    let (kx, ky) = (sp.kx_odd(), sp.ky_odd());
    nh.par_iter_mut()
        .zip(vxh.par_iter_mut())
        .zip(vyh.par_iter_mut())
        .enumerate()
        .for_each(|(i, ((nn, vx), vy))| {
            let (px, py) = (kx[i % nx], ky[i / nx]);
            let k = (px * px + py * py).sqrt();
            if k == 0.0 {
                return;
            }
            let (ux, uy) = (px / k, py / k);
            let a = ux * *vx + uy * *vy;
            let (s, c) = (k * tau).sin_cos();
            let i_unit = Complex64::new(0.0, 1.0);
            let n_new = *nn * c - i_unit * a * s;
            let a_new = a * c - i_unit * *nn * s;
            *nn = n_new;
            *vx += ux * (a_new - a);
            *vy += uy * (a_new - a);
        });
    for (field, hat) in [(n, nh), (&mut v.vx, vxh), (&mut v.vy, vyh)] {
        let mut hat = hat;
        sp.inverse(&mut hat);
        for (o, z) in field.values_mut().iter_mut().zip(hat) {
            *o = z.re;
        }
    }
}

fn coupling_rhs(e1: Complex64, e2: Complex64, n: f64, eta: f64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let m = e1 * e2.conj() - e1.conj() * e2;
    (
        -i * n * e1 + i * eta * e2 * m,
        -i * n * e2 - i * eta * e1 * m,
    )
}

fn coupling_point(
    e1: Complex64,
    e2: Complex64,
    n: f64,
    eta: f64,
    tau: f64,
    scheme: NonlinearScheme,
) -> (Complex64, Complex64) {
    match scheme {
        NonlinearScheme::Exact => {
            let s = (e1 * e2.conj()).im;
            let (sn, cs) = (2.0 * eta * s * tau).sin_cos();
            let phase = Complex64::from_polar(1.0, -n * tau);
            (phase * (e1 * cs - e2 * sn), phase * (e1 * sn + e2 * cs))
        }
        NonlinearScheme::Rk4 { substeps } => {
            let h = tau / substeps as f64;
            let (mut a, mut b) = (e1, e2);
            for _ in 0..substeps {
                let (k1a, k1b) = coupling_rhs(a, b, n, eta);
                let (k2a, k2b) = coupling_rhs(a + 0.5 * h * k1a, b + 0.5 * h * k1b, n, eta);
                let (k3a, k3b) = coupling_rhs(a + 0.5 * h * k2a, b + 0.5 * h * k2b, n, eta);
                let (k4a, k4b) = coupling_rhs(a + h * k3a, b + h * k3b, n, eta);
                a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
                b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
            }
            (a, b)
        }
    }
}

/// Coupling substep over `tau`: `n` frozen, `E` advanced pointwise and `v` pushed
/// by `-τ∇(|E1|²+|E2|²)` (the density is constant along this flow). Returns the
/// max-norm drift of the two pointwise invariants.
pub(crate) fn coupling_flow(
    state: &mut SystemState,
    eta: f64,
    tau: f64,
    scheme: NonlinearScheme,
) -> (f64, f64) {
    let grid = *state.grid();
    let sp = spectral(&grid);
    let rho: Vec<f64> = state.density();
    let n = state.n.values().to_vec();
    let (d_rho, d_im) = state
        .e1
        .values_mut()
        .par_iter_mut()
        .zip(state.e2.values_mut().par_iter_mut())
        .zip(n.par_iter())
        .map(|((a, b), &nn)| {
            let before = (a.norm_sqr() + b.norm_sqr(), (*a * b.conj()).im);
            let (na, nb) = coupling_point(*a, *b, nn, eta, tau, scheme);
            *a = na;
            *b = nb;
            let after = (na.norm_sqr() + nb.norm_sqr(), (na * nb.conj()).im);
            ((after.0 - before.0).abs(), (after.1 - before.1).abs())
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));

    // v -= τ ∇ρ with the quadratic density dealiased
    let mut rh: Vec<Complex64> = rho.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    sp.forward(&mut rh);
    sp.truncate(&mut rh);
    let nx = grid.nx();
    let (kx, ky) = (sp.kx_odd(), sp.ky_odd());
    let mut gx: Vec<Complex64> = rh
        .iter()
        .enumerate()
        .map(|(i, z)| z * Complex64::new(0.0, kx[i % nx]))
        .collect();
    let mut gy: Vec<Complex64> = rh
        .iter()
        .enumerate()
        .map(|(i, z)| z * Complex64::new(0.0, ky[i / nx]))
        .collect();
    sp.inverse(&mut gx);
    sp.inverse(&mut gy);
    for (o, g) in state.v.vx.values_mut().iter_mut().zip(&gx) {
        *o -= tau * g.re;
    }
    for (o, g) in state.v.vy.values_mut().iter_mut().zip(&gy) {
        *o -= tau * g.re;
    }
    (d_rho, d_im)
}

/// One Strang step with its invariant bookkeeping.
pub fn step_with_report(state: &SystemState, config: &StepperConfig) -> Result<(SystemState, StepReport)> {
    config.validate()?;
    let dt = config.dt;
    let half = 0.5 * dt;
    let mass_before = super::mass(state)?;

    let mut s = state.clone();
    schrodinger_flow(&mut s.e1, half);
    schrodinger_flow(&mut s.e2, half);
    wave_flow(&mut s.n, &mut s.v, half);
    let (density_drift, im_product_drift) = coupling_flow(&mut s, config.eta, dt, config.nonlinear);
    wave_flow(&mut s.n, &mut s.v, half);
    schrodinger_flow(&mut s.e1, half);
    schrodinger_flow(&mut s.e2, half);
    s.t = state.t + dt;

    if s.check_finite().is_err() {
        return Err(MzkError::BlowUpReached {
            t: state.t,
            reason: "non-finite samples after step".into(),
            last_valid: Box::new(state.clone()),
        });
    }
    let rho_scale = state.density().iter().copied().fold(1.0, f64::max);
    if density_drift > 1e-11 * rho_scale || im_product_drift > 1e-11 * rho_scale {
        return Err(MzkError::Accuracy {
            quantity: "pointwise coupling invariant",
            drift: density_drift.max(im_product_drift) / rho_scale,
            tolerance: 1e-11,
        });
    }
    let mass_after = super::mass(&s)?;
    let mass_drift = if mass_before > 0.0 {
        (mass_after - mass_before).abs() / mass_before
    } else {
        mass_after
    };
    if mass_drift > config.drift_tolerance {
        return Err(MzkError::Accuracy {
            quantity: "mass",
            drift: mass_drift,
            tolerance: config.drift_tolerance,
        });
    }
    Ok((
        s,
        StepReport {
            density_drift,
            im_product_drift,
            mass_drift,
        },
    ))
}

/// Advance `state` by one Strang step of size `config.dt`.
pub fn step(state: &SystemState, config: &StepperConfig) -> Result<SystemState> {
    step_with_report(state, config).map(|(s, _)| s)
}
