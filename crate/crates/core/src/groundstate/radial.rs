use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{MzkError, Result};
use crate::fields::{ComplexField2D, Grid2D, RealField2D};

/// A radial function sampled on a uniform grid `r_i = i·h`, `i = 0..n`.
///
/// Slopes are stored alongside values so that evaluation between samples is a
/// cubic Hermite interpolant. Beyond `r_max` the profile continues as
/// `f(r_max)·exp(-decay_rate·(r - r_max))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub r_max: f64,
    pub decay_rate: f64,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>, decay_rate: f64) -> Result<Self> {
        if r.len() < 5 || values.len() != r.len() || slopes.len() != r.len() {
            return Err(MzkError::Contract(format!(
                "radial profile needs >= 5 matching samples (r {}, values {}, slopes {})",
                r.len(),
                values.len(),
                slopes.len()
            )));
        }
        if r[0] != 0.0 {
            return Err(MzkError::Contract("radial grid must start at r = 0".into()));
        }
        let h = r[1];
        let uniform = r
            .iter()
            .enumerate()
            .all(|(i, &ri)| (ri - i as f64 * h).abs() <= 1e-9 * h.max(ri));
        if !(h > 0.0) || !uniform {
            return Err(MzkError::Contract("radial grid must be uniform and increasing".into()));
        }
        if values.iter().chain(&slopes).any(|x| !x.is_finite()) || !decay_rate.is_finite() {
            return Err(MzkError::InvalidField("non-finite radial sample".into()));
        }
        let r_max = *r.last().unwrap();
        Ok(Self {
            r,
            values,
            slopes,
            r_max,
            decay_rate,
        })
    }

    /// Build from values alone; slopes come from fourth-order differences.
    pub fn from_values(r: Vec<f64>, values: Vec<f64>, decay_rate: f64) -> Result<Self> {
        let h = r.get(1).copied().unwrap_or(0.0);
        let (d1, _) = fd_derivatives(&values, h);
        Self::new(r, values, d1, decay_rate)
    }

    pub fn step(&self) -> f64 {
        self.r[1]
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn value_at_origin(&self) -> f64 {
        self.values[0]
    }

    /// `|f(r_max)| / |f(0)|`.
    pub fn tail_ratio(&self) -> f64 {
        (self.values.last().unwrap() / self.values[0]).abs()
    }

    /// Value and radial derivative at `r >= 0`.
    pub fn eval_with_slope(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        let h = self.step();
        let last = self.len() - 1;
        if r >= self.r_max {
            let f = self.values[last] * (-self.decay_rate * (r - self.r_max)).exp();
            return (f, -self.decay_rate * f);
        }
        let i = ((r / h) as usize).min(last - 1);
        let s = (r - self.r[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let f = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (f, d)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_slope(r).0
    }

    /// Sample `scale·f(|x|)` on a 2D grid centred at the origin.
    pub fn to_real_field(&self, grid: Grid2D, scale: f64) -> RealField2D {
        RealField2D::from_fn(grid, |x, y| scale * self.eval((x * x + y * y).sqrt()))
    }

    pub fn to_complex_field(&self, grid: Grid2D, scale: f64) -> ComplexField2D {
        ComplexField2D::from_fn(grid, |x, y| {
            Complex64::new(scale * self.eval((x * x + y * y).sqrt()), 0.0)
        })
    }

    /// `∫_{ℝ²} g(f, f') dx` with the radial weight `2πr`, closing the tail with the
    /// exponential continuation (`g` is assumed to decay at `tail_power·decay_rate`).
    pub fn integrate(&self, tail_power: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
        let samples: Vec<f64> = self
            .values
            .iter()
            .zip(&self.slopes)
            .map(|(&f, &d)| g(f, d))
            .collect();
        radial_integral(&samples, self.step(), tail_power * self.decay_rate)
    }

    /// `‖f‖²_{L²(ℝ²)}`.
    pub fn mass(&self) -> f64 {
        self.integrate(2.0, |f, _| f * f)
    }

    /// `‖∇f‖²_{L²(ℝ²)}`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.integrate(2.0, |_, d| d * d)
    }

    /// `∫ f⁴`.
    pub fn l4_norm_4(&self) -> f64 {
        self.integrate(4.0, |f, _| f.powi(4))
    }
}

/// `2π ∫_0^∞ g(r) r dr` from uniform samples of `g` on `[0, r_max]`.
///
/// Composite Simpson on the sampled range (a 3/8 panel absorbs an odd interval
/// count); the tail is closed assuming `g(r) = g(r_max)·exp(-rate·(r - r_max))`.
pub fn radial_integral(g: &[f64], h: f64, tail_rate: f64) -> f64 {
    let n = g.len();
    let w: Vec<f64> = g.iter().enumerate().map(|(i, &v)| v * i as f64 * h).collect();
    let intervals = n - 1;
    let mut sum = 0.0;
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    let mut i = 0;
    while i < simpson_end {
        sum += h / 3.0 * (w[i] + 4.0 * w[i + 1] + w[i + 2]);
        i += 2;
    }
    if simpson_end < intervals {
        let j = simpson_end;
        sum += 3.0 * h / 8.0 * (w[j] + 3.0 * w[j + 1] + 3.0 * w[j + 2] + w[j + 3]);
    }
    let r_max = intervals as f64 * h;
    let gm = g[n - 1];
    if tail_rate > 0.0 && gm != 0.0 {
        sum += gm * (r_max / tail_rate + 1.0 / (tail_rate * tail_rate));
    }
    2.0 * PI * sum
}

/// First and second radial derivatives by fourth-order central differences.
///
/// Even parity `f(-r) = f(r)` supplies the ghost samples at the origin; the two
/// outermost samples fall back to second-order one-sided/central stencils.
pub fn fd_derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let at = |i: isize| -> f64 {
        if i < 0 {
            f[(-i) as usize]
        } else {
            f[i as usize]
        }
    };
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let k = i as isize;
        if i + 2 < n {
            d1[i] = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
            d2[i] = (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) + 16.0 * at(k + 1) - at(k + 2))
                / (12.0 * h * h);
        } else if i + 1 < n {
            d1[i] = (at(k + 1) - at(k - 1)) / (2.0 * h);
            d2[i] = (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h);
        } else {
            d1[i] = (3.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) / (2.0 * h);
            d2[i] = (2.0 * at(k) - 5.0 * at(k - 1) + 4.0 * at(k - 2) - at(k - 3)) / (h * h);
        }
    }
    d1[0] = 0.0;
    (d1, d2)
}

/// Radial Laplacian `f'' + f'/r` with the `r → 0` limit `2f''(0)`.
pub fn radial_laplacian(d1: &[f64], d2: &[f64], h: f64) -> Vec<f64> {
    d1.iter()
        .zip(d2)
        .enumerate()
        .map(|(i, (&a, &b))| if i == 0 { 2.0 * b } else { b + a / (i as f64 * h) })
        .collect()
}
