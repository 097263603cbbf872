use num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::{MzkError, Result};

/// Common read access to sampled fields, used by the norm and derivative routines.
pub trait SampledField: Sized {
    fn grid(&self) -> &Grid2D;

    /// Samples promoted to complex values.
    fn to_complex(&self) -> Vec<Complex64>;

    /// Rebuild from complex samples (real fields keep the real part).
    fn from_complex(grid: Grid2D, values: Vec<Complex64>) -> Self;

    /// `|f|²` at each sample.
    fn modulus_sq(&self) -> Vec<f64>;

    fn check_finite(&self) -> Result<()>;
}

/// Complex samples on a [`Grid2D`]; houses `E1`, `E2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField2D {
    grid: Grid2D,
    values: Vec<Complex64>,
}

/// Real samples on a [`Grid2D`]; houses `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField2D {
    grid: Grid2D,
    values: Vec<f64>,
}

/// Two real components sharing one grid; houses `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2D {
    pub vx: RealField2D,
    pub vy: RealField2D,
}

fn check_len(grid: &Grid2D, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(MzkError::InvalidField(format!(
            "expected {} samples for a {}x{} grid, got {len}",
            grid.len(),
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(())
}

impl ComplexField2D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        let f = Self { grid, values };
        f.check_finite()?;
        Ok(f)
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        Self {
            grid,
            values: grid.points().map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn from_raw(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map(|z| z * a)
    }

}

impl RealField2D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        let f = Self { grid, values };
        f.check_finite()?;
        Ok(f)
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.points().map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_raw(grid: Grid2D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

}

impl VectorField2D {
    pub fn new(vx: RealField2D, vy: RealField2D) -> Result<Self> {
        if !vx.grid.same_shape(&vy.grid) {
            return Err(MzkError::Contract("vector components on different grids".into()));
        }
        Ok(Self { vx, vy })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            vx: RealField2D::zeros(grid),
            vy: RealField2D::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.vx.grid
    }

    pub fn l2_norm_sq(&self) -> f64 {
        super::l2_norm_sq(&self.vx) + super::l2_norm_sq(&self.vy)
    }
}

impl SampledField for ComplexField2D {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn to_complex(&self) -> Vec<Complex64> {
        self.values.clone()
    }

    fn from_complex(grid: Grid2D, values: Vec<Complex64>) -> Self {
        Self::from_raw(grid, values)
    }

    fn modulus_sq(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            Some(i) => Err(MzkError::InvalidField(format!("non-finite sample at index {i}"))),
            None => Ok(()),
        }
    }
}

impl SampledField for RealField2D {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn to_complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn from_complex(grid: Grid2D, values: Vec<Complex64>) -> Self {
        Self::from_raw(grid, values.into_iter().map(|z| z.re).collect())
    }

    fn modulus_sq(&self) -> Vec<f64> {
        self.values.iter().map(|x| x * x).collect()
    }

    fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(MzkError::InvalidField(format!("non-finite sample at index {i}"))),
            None => Ok(()),
        }
    }
}

/// The tuple `(E1, E2, n, v)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub e1: ComplexField2D,
    pub e2: ComplexField2D,
    pub n: RealField2D,
    pub v: VectorField2D,
    pub t: f64,
}

impl SystemState {
    pub fn new(
        e1: ComplexField2D,
        e2: ComplexField2D,
        n: RealField2D,
        v: VectorField2D,
        t: f64,
    ) -> Result<Self> {
        let g = e1.grid;
        if !(g.same_shape(&e2.grid) && g.same_shape(&n.grid) && g.same_shape(v.grid())) {
            return Err(MzkError::Contract("state fields live on different grids".into()));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(MzkError::Domain {
                name: "t",
                value: t,
                reason: "time must be finite and >= 0",
            });
        }
        let st = Self { e1, e2, n, v, t };
        st.check_finite()?;
        Ok(st)
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            e1: ComplexField2D::zeros(grid),
            e2: ComplexField2D::zeros(grid),
            n: RealField2D::zeros(grid),
            v: VectorField2D::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.e1.grid
    }

    pub fn check_finite(&self) -> Result<()> {
        self.e1.check_finite()?;
        self.e2.check_finite()?;
        self.n.check_finite()?;
        self.v.vx.check_finite()?;
        self.v.vy.check_finite()
    }

    /// `|E1|² + |E2|²` at each sample.
    pub fn density(&self) -> Vec<f64> {
        self.e1
            .values
            .iter()
            .zip(&self.e2.values)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    pub(crate) fn same_grid(&self, other: &SystemState) -> bool {
        self.grid().same_shape(other.grid())
    }
}
