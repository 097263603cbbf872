use serde::{Deserialize, Serialize};

use crate::error::{MzkError, Result};

/// Uniform periodic grid on the square `[-L/2, L/2)²`.
///
/// Sample `(ix, iy)` sits at `(-L/2 + ix·L/nx, -L/2 + iy·L/ny)`; the origin is the
/// sample `(nx/2, ny/2)`, so radial profiles and the `x ↦ x/λ` rescaling are both
/// centred on a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    side: f64,
    dealias_fraction: f64,
}

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

impl Grid2D {
    pub fn new(nx: usize, ny: usize, side: f64) -> Result<Self> {
        Self::with_dealias(nx, ny, side, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_dealias(nx: usize, ny: usize, side: f64, dealias_fraction: f64) -> Result<Self> {
        if nx < 2 || !nx.is_power_of_two() || ny < 2 || !ny.is_power_of_two() {
            return Err(MzkError::InvalidGrid(format!(
                "mode counts must be powers of two >= 2, got {nx}x{ny}"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(MzkError::InvalidGrid(format!("box side must be > 0, got {side}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(MzkError::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            side,
            dealias_fraction,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Box side length `L`.
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of samples `nx·ny`.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.side / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.side / self.ny as f64
    }

    /// Trapezoidal quadrature weight `(L/nx)(L/ny)`.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.side + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        -0.5 * self.side + iy as f64 * self.dy()
    }

    /// Row-major index: rows are `iy`, `ix` runs fastest.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Iterator over `(x, y)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (self.x(ix), self.y(iy))))
    }

    /// Same mode counts on a box of side `factor·L`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_dealias(self.nx, self.ny, self.side * factor, self.dealias_fraction)
    }

    pub(crate) fn same_shape(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.side.to_bits() == other.side.to_bits()
    }
}
