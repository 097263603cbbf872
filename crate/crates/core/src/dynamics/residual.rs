use num_complex::Complex64;

use crate::error::{MzkError, Result};
use crate::fields::{
    divergence, gradient, l2_norm_sq, laplacian, ComplexField2D, RealField2D, SystemState,
    VectorField2D,
};

/// Time derivatives `(∂t E1, ∂t E2, ∂t n, ∂t v)` of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative {
    pub e1: ComplexField2D,
    pub e2: ComplexField2D,
    pub n: RealField2D,
    pub v: VectorField2D,
}

impl StateDerivative {
    pub fn zeros(state: &SystemState) -> Self {
        let g = *state.grid();
        Self {
            e1: ComplexField2D::zeros(g),
            e2: ComplexField2D::zeros(g),
            n: RealField2D::zeros(g),
            v: VectorField2D::zeros(g),
        }
    }

    /// Centred difference `(next - prev) / (t_next - t_prev)`; the two spacings
    /// around `centre` must agree.
    pub fn centered(prev: &SystemState, centre: &SystemState, next: &SystemState) -> Result<Self> {
        if !(prev.same_grid(centre) && next.same_grid(centre)) {
            return Err(MzkError::Contract("states for centred differences use different grids".into()));
        }
        let (d1, d2) = (centre.t - prev.t, next.t - centre.t);
        if !(d1 > 0.0 && d2 > 0.0) || (d1 - d2).abs() > 1e-9 * d1.max(d2) {
            return Err(MzkError::Contract(format!(
                "centred difference needs equal positive spacing, got {d1} and {d2}"
            )));
        }
        let inv = 1.0 / (next.t - prev.t);
        let g = *centre.grid();
        let cdiff = |a: &ComplexField2D, b: &ComplexField2D| {
            ComplexField2D::from_raw(
                g,
                a.values().iter().zip(b.values()).map(|(x, y)| (y - x) * inv).collect(),
            )
        };
        let rdiff = |a: &RealField2D, b: &RealField2D| {
            RealField2D::from_raw(
                g,
                a.values().iter().zip(b.values()).map(|(x, y)| (y - x) * inv).collect(),
            )
        };
        Ok(Self {
            e1: cdiff(&prev.e1, &next.e1),
            e2: cdiff(&prev.e2, &next.e2),
            n: rdiff(&prev.n, &next.n),
            v: VectorField2D {
                vx: rdiff(&prev.v.vx, &next.v.vx),
                vy: rdiff(&prev.v.vy, &next.v.vy),
            },
        })
    }
}

/// Pointwise left-hand sides of the four equations.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub r1: ComplexField2D,
    pub r2: ComplexField2D,
    pub r3: RealField2D,
    pub r4: VectorField2D,
}

impl Residual {
    /// `L²` norms of the four residual components.
    pub fn l2_norms(&self) -> [f64; 4] {
        [
            l2_norm_sq(&self.r1).sqrt(),
            l2_norm_sq(&self.r2).sqrt(),
            l2_norm_sq(&self.r3).sqrt(),
            self.r4.l2_norm_sq().sqrt(),
        ]
    }

    /// `(Σ ‖r_j‖²)^{1/2}`.
    pub fn total_l2(&self) -> f64 {
        self.l2_norms().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Every residual sample multiplied by `s` (used by the rescaling identities).
    pub fn scaled(&self, s: f64) -> Self {
        let c = |f: &ComplexField2D| f.map(|z| z * s);
        let r = |f: &RealField2D| f.map(|x| x * s);
        Self {
            r1: c(&self.r1),
            r2: c(&self.r2),
            r3: r(&self.r3),
            r4: VectorField2D {
                vx: r(&self.r4.vx),
                vy: r(&self.r4.vy),
            },
        }
    }
}

/// Evaluate
///
/// ```text
/// r1 = i·c·E1_t + ΔE1 - nE1 + ηE2(E1Ē2 - Ē1E2)
/// r2 = i·c·E2_t + ΔE2 - nE2 + ηE1(Ē1E2 - E1Ē2)
/// r3 = n_t + ∇·v
/// r4 = v_t + ∇(n + |E1|² + |E2|²)
/// ```
///
/// with `c = schrodinger_time_factor` (1 for the original system, `1/λ` for the
/// rescaled one).
pub fn residual_with_factor(
    state: &SystemState,
    dt: &StateDerivative,
    eta: f64,
    schrodinger_time_factor: f64,
) -> Result<Residual> {
    state.check_finite()?;
    let g = state.grid();
    if !(g.same_shape(dt.e1.grid())
        && g.same_shape(dt.e2.grid())
        && g.same_shape(dt.n.grid())
        && g.same_shape(dt.v.grid()))
    {
        return Err(MzkError::Contract("time derivatives live on a different grid".into()));
    }
    let i = Complex64::new(0.0, schrodinger_time_factor);
    let lap1 = laplacian(&state.e1)?;
    let lap2 = laplacian(&state.e2)?;
    let n = state.n.values();
    let mut r1 = Vec::with_capacity(g.len());
    let mut r2 = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let (a, b) = (state.e1.values()[k], state.e2.values()[k]);
        let m = a * b.conj() - a.conj() * b;
        r1.push(i * dt.e1.values()[k] + lap1.values()[k] - n[k] * a + eta * b * m);
        r2.push(i * dt.e2.values()[k] + lap2.values()[k] - n[k] * b - eta * a * m);
    }
    let div = divergence(&state.v)?;
    let r3: Vec<f64> = dt.n.values().iter().zip(div.values()).map(|(a, b)| a + b).collect();
    let potential = RealField2D::from_raw(
        *g,
        n.iter().zip(state.density()).map(|(a, b)| a + b).collect(),
    );
    let grad = gradient(&potential)?;
    let r4 = VectorField2D {
        vx: RealField2D::from_raw(
            *g,
            dt.v.vx.values().iter().zip(grad.vx.values()).map(|(a, b)| a + b).collect(),
        ),
        vy: RealField2D::from_raw(
            *g,
            dt.v.vy.values().iter().zip(grad.vy.values()).map(|(a, b)| a + b).collect(),
        ),
    };
    Ok(Residual {
        r1: ComplexField2D::from_raw(*g, r1),
        r2: ComplexField2D::from_raw(*g, r2),
        r3: RealField2D::from_raw(*g, r3),
        r4,
    })
}

/// Residual of the original system for `state` with time derivatives `dt`.
pub fn residual(state: &SystemState, dt: &StateDerivative, eta: f64) -> Result<Residual> {
    residual_with_factor(state, dt, eta, 1.0)
}

/// Residual at the middle state of three equally spaced snapshots.
pub fn residual_centered(
    prev: &SystemState,
    centre: &SystemState,
    next: &SystemState,
    eta: f64,
) -> Result<Residual> {
    let dt = StateDerivative::centered(prev, centre, next)?;
    residual(centre, &dt, eta)
}
