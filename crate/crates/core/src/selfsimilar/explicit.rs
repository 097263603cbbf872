//! The explicit blow-up family
//!
//! ```text
//! E1 = (ω/τ) e^{i(θ + ω²/τ - |x|²/(4τ))} P̃(ω|x|/τ) / √2,   E2 = -i E1,
//! n  = (ω²/τ²) Ñ(ω|x|/τ),                                     τ = T - t,
//! ```
//!
//! with `P̃ = P/√(η+1)` and `Ñ = N/(η+1)`.

use num_complex::Complex64;
use serde::Serialize;

use super::ProfilePair;
use crate::dynamics::StateDerivative;
use crate::error::{MzkError, Result};
use crate::fields::{
    apply_multiplier, spectral, ComplexField2D, Grid2D, RealField2D,
    SystemState, VectorField2D,
};

/// Samples per profile width `τ/ω` below which a state is flagged as under-resolved.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 4.0;
/// Profile value at the box edge, relative to its central value, above which a
/// state is flagged as truncated by the periodic box.
pub const MAX_EDGE_RATIO: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplicitSolution {
    pub profile: ProfilePair,
    #[serde(rename = "T")]
    pub t_blow: f64,
    pub theta: f64,
}

/// Reasons a sampled explicit state may not represent the closed form faithfully.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ResolutionWarning {
    /// Grid spacing too coarse for the profile width `τ/ω`.
    UnderResolved { width: f64, dx: f64 },
    /// The profile has not decayed at the box edge.
    Truncated { edge_ratio: f64 },
}

impl std::fmt::Display for ResolutionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResolutionWarning::UnderResolved { width, dx } => {
                write!(f, "profile width {width:e} is resolved by fewer than {MIN_SAMPLES_PER_WIDTH} cells of size {dx:e}")
            }
            ResolutionWarning::Truncated { edge_ratio } => {
                write!(f, "profile at the box edge is {edge_ratio:e} of its central value")
            }
        }
    }
}

/// Pointwise data shared by the state and its time derivative.
struct Sample {
    tau: f64,
    omega: f64,
    /// `1/√2 · 1/√(η+1)`
    p_scale: f64,
    /// `1/(η+1)`
    n_scale: f64,
}

impl ExplicitSolution {
    /// `profile.omega` must be finite; use [`super::seeded_profile`] to attach a
    /// finite `ω` to the limit pair.
    pub fn new(profile: ProfilePair, t_blow: f64, theta: f64) -> Result<Self> {
        if !(profile.omega.is_finite() && profile.omega > 0.0) {
            return Err(MzkError::Domain {
                name: "omega",
                value: profile.omega,
                reason: "the explicit family needs a finite positive omega",
            });
        }
        if !(t_blow > 0.0 && t_blow.is_finite()) {
            return Err(MzkError::Domain {
                name: "T",
                value: t_blow,
                reason: "blow-up time must be > 0",
            });
        }
        if !theta.is_finite() {
            return Err(MzkError::Domain {
                name: "theta",
                value: theta,
                reason: "phase must be finite",
            });
        }
        Ok(Self {
            profile,
            t_blow,
            theta,
        })
    }

    pub fn omega(&self) -> f64 {
        self.profile.omega
    }

    pub fn eta(&self) -> f64 {
        self.profile.eta
    }

    /// Spatial scale `τ/ω` of the profile at time `t`.
    pub fn width(&self, t: f64) -> f64 {
        (self.t_blow - t) / self.omega()
    }

    fn sample(&self, t: f64) -> Result<Sample> {
        if !(t < self.t_blow) || !t.is_finite() {
            return Err(MzkError::Domain {
                name: "t",
                value: t,
                reason: "must be before the blow-up time T",
            });
        }
        if t < 0.0 {
            return Err(MzkError::Domain {
                name: "t",
                value: t,
                reason: "must be >= 0",
            });
        }
        let eta = self.eta();
        Ok(Sample {
            tau: self.t_blow - t,
            omega: self.omega(),
            p_scale: 1.0 / (2.0 * (eta + 1.0)).sqrt(),
            n_scale: 1.0 / (eta + 1.0),
        })
    }

    /// Sample the closed form at time `t`; `v` is the mean-free curl-free field with
    /// `∇·v = -n_t`.
    pub fn evaluate(&self, t: f64, grid: Grid2D) -> Result<SystemState> {
        Ok(self.evaluate_checked(t, grid)?.0)
    }

    /// [`Self::evaluate`] plus resolution warnings.
    pub fn evaluate_checked(&self, t: f64, grid: Grid2D) -> Result<(SystemState, Vec<ResolutionWarning>)> {
        let s = self.sample(t)?;
        let e1 = ComplexField2D::from_fn(grid, |x, y| self.e1_at(&s, x, y));
        let e2 = e1.map(|z| Complex64::new(0.0, -1.0) * z);
        let n = RealField2D::from_fn(grid, |x, y| {
            let rho = s.omega * (x * x + y * y).sqrt() / s.tau;
            (s.omega / s.tau).powi(2) * s.n_scale * self.profile.n.eval(rho)
        });
        let n_t = self.n_t_field(&s, grid);
        let v = curl_free_from_divergence(&n_t, -1.0);
        let mut warnings = Vec::new();
        let width = s.tau / s.omega;
        let dx = grid.dx().max(grid.dy());
        if width < MIN_SAMPLES_PER_WIDTH * dx {
            warnings.push(ResolutionWarning::UnderResolved { width, dx });
        }
        let half = 0.5 * grid.side().min(grid.side());
        let edge_ratio = (self.profile.p.eval(s.omega * half / s.tau) / self.profile.p.value_at_origin()).abs();
        if edge_ratio > MAX_EDGE_RATIO {
            warnings.push(ResolutionWarning::Truncated { edge_ratio });
        }
        Ok((SystemState::new(e1, e2, n, v, t)?, warnings))
    }

    fn e1_at(&self, s: &Sample, x: f64, y: f64) -> Complex64 {
        let r2 = x * x + y * y;
        let rho = s.omega * r2.sqrt() / s.tau;
        let phase = self.theta + s.omega * s.omega / s.tau - r2 / (4.0 * s.tau);
        Complex64::from_polar(s.omega / s.tau * s.p_scale * self.profile.p.eval(rho), phase)
    }

    fn n_t_field(&self, s: &Sample, grid: Grid2D) -> RealField2D {
        RealField2D::from_fn(grid, |x, y| {
            let rho = s.omega * (x * x + y * y).sqrt() / s.tau;
            let (f, d) = self.profile.n.eval_with_slope(rho);
            s.omega * s.omega / s.tau.powi(3) * s.n_scale * (2.0 * f + rho * d)
        })
    }

    /// Closed-form `v = -(ω²/τ³) x Ñ(ω|x|/τ)` without periodisation.
    pub fn analytic_velocity(&self, t: f64, grid: Grid2D) -> Result<VectorField2D> {
        let s = self.sample(t)?;
        let c = -s.omega * s.omega / s.tau.powi(3) * s.n_scale;
        let f = |x: f64, y: f64| c * self.profile.n.eval(s.omega * (x * x + y * y).sqrt() / s.tau);
        VectorField2D::new(
            RealField2D::from_fn(grid, |x, y| x * f(x, y)),
            RealField2D::from_fn(grid, |x, y| y * f(x, y)),
        )
    }

    /// Analytic time derivatives of the sampled state at `t`.
    pub fn time_derivative(&self, t: f64, grid: Grid2D) -> Result<StateDerivative> {
        let s = self.sample(t)?;
        let e1 = ComplexField2D::from_fn(grid, |x, y| {
            let r2 = x * x + y * y;
            let rho = s.omega * r2.sqrt() / s.tau;
            let phase = self.theta + s.omega * s.omega / s.tau - r2 / (4.0 * s.tau);
            let (f, d) = self.profile.p.eval_with_slope(rho);
            let e = Complex64::from_polar(s.omega / s.tau * s.p_scale * f, phase);
            let rot = Complex64::from_polar(1.0, phase);
            e / s.tau * Complex64::new(1.0, s.omega * s.omega / s.tau - r2 / (4.0 * s.tau))
                + rot * (s.omega / (s.tau * s.tau) * s.p_scale * rho * d)
        });
        let e2 = e1.map(|z| Complex64::new(0.0, -1.0) * z);
        let n = self.n_t_field(&s, grid);
        let c = -s.omega * s.omega / s.tau.powi(4) * s.n_scale;
        let g = |x: f64, y: f64| {
            let rho = s.omega * (x * x + y * y).sqrt() / s.tau;
            let (f, d) = self.profile.n.eval_with_slope(rho);
            c * (3.0 * f + rho * d)
        };
        let v = VectorField2D::new(
            RealField2D::from_fn(grid, |x, y| x * g(x, y)),
            RealField2D::from_fn(grid, |x, y| y * g(x, y)),
        )?;
        Ok(StateDerivative { e1, e2, n, v })
    }
}

/// The mean-free gradient field `w` with `∇·w = sign·f`.
pub(crate) fn curl_free_from_divergence(f: &RealField2D, sign: f64) -> VectorField2D {
    let grid = *f.grid();
    let sp = spectral(&grid);
    let mut hat: Vec<Complex64> = f.values().iter().map(|&x| Complex64::new(x * sign, 0.0)).collect();
    sp.forward(&mut hat);
    // w = ∇φ with Δφ = sign·f, so ŵ = -i k (sign·f̂) / |k|².
    let mut inv = hat;
    for (i, z) in inv.iter_mut().enumerate() {
        let k2 = sp.k_sq(i);
        *z = if k2 > 0.0 { *z / k2 } else { Complex64::new(0.0, 0.0) };
    }
    let mut wx = inv.clone();
    let mut wy = inv;
    apply_multiplier(&sp, &grid, &mut wx, |kx, _| Complex64::new(0.0, -kx), true);
    apply_multiplier(&sp, &grid, &mut wy, |_, ky| Complex64::new(0.0, -ky), true);
    sp.inverse(&mut wx);
    sp.inverse(&mut wy);
    VectorField2D {
        vx: RealField2D::from_raw(grid, wx.iter().map(|z| z.re).collect()),
        vy: RealField2D::from_raw(grid, wy.iter().map(|z| z.re).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{mass, residual};
    use crate::fields::l2_norm_sq;
    use crate::groundstate::reference_q;
    use crate::selfsimilar::seeded_profile;

    fn family(omega: f64, t_blow: f64) -> ExplicitSolution {
        ExplicitSolution::new(seeded_profile(reference_q(), omega, 1.0).unwrap(), t_blow, 0.3).unwrap()
    }

    #[test]
    fn second_component_is_rotated_first() {
        let sol = family(20.0, 1.0);
        let st = sol.evaluate(0.5, Grid2D::new(64, 64, 1.0).unwrap()).unwrap();
        for (a, b) in st.e1.values().iter().zip(st.e2.values()) {
            assert_eq!(*b, Complex64::new(a.im, -a.re));
        }
    }

    #[test]
    fn mass_and_scaled_n_norm_are_time_independent() {
        let sol = family(20.0, 1.0);
        let g = Grid2D::new(256, 256, 1.0).unwrap();
        let (a, wa) = sol.evaluate_checked(0.5, g).unwrap();
        let (b, wb) = sol.evaluate_checked(0.65, g).unwrap();
        assert!(wa.is_empty() && wb.is_empty(), "{wa:?} {wb:?}");
        let (ma, mb) = (mass(&a).unwrap(), mass(&b).unwrap());
        assert!((ma / mb - 1.0).abs() < 1e-8, "{ma} {mb}");
        let (na, nb) = (0.5 * l2_norm_sq(&a.n).sqrt(), 0.35 * l2_norm_sq(&b.n).sqrt());
        assert!((na / nb - 1.0).abs() < 1e-8, "{na} {nb}");
    }

    #[test]
    fn spectral_velocity_matches_closed_form() {
        let sol = family(20.0, 1.0);
        let g = Grid2D::new(256, 256, 1.0).unwrap();
        let st = sol.evaluate(0.5, g).unwrap();
        let v = sol.analytic_velocity(0.5, g).unwrap();
        let diff: f64 = st
            .v
            .vx
            .values()
            .iter()
            .zip(v.vx.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = v.vx.values().iter().map(|a| a.abs()).fold(0.0, f64::max);
        assert!(diff < 1e-6 * scale, "{diff} {scale}");
    }

    #[test]
    fn residual_shrinks_with_omega_at_fixed_scale() {
        let g = Grid2D::new(256, 256, 40.0).unwrap();
        let kappa = 1.0;
        let mut last = f64::INFINITY;
        for omega in [2.0, 4.0, 8.0, 16.0] {
            let sol = family(omega, omega / kappa);
            let st = sol.evaluate(0.0, g).unwrap();
            let dt = sol.time_derivative(0.0, g).unwrap();
            let res = residual(&st, &dt, 1.0).unwrap();
            let r = res.total_l2();
            assert!(r < 0.3 * last, "omega = {omega}: {r} vs {last}");
            last = r;
        }
    }

    #[test]
    fn rejects_times_past_blow_up() {
        let sol = family(20.0, 1.0);
        let g = Grid2D::new(16, 16, 1.0).unwrap();
        assert!(matches!(sol.evaluate(1.0, g), Err(MzkError::Domain { name: "t", .. })));
        assert!(matches!(sol.evaluate(2.0, g), Err(MzkError::Domain { name: "t", .. })));
        let (_, w) = sol.evaluate_checked(0.99, g).unwrap();
        assert!(matches!(w[0], ResolutionWarning::UnderResolved { .. }));
    }
}
