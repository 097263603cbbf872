//! Periodic-grid field containers, spectral derivatives, norms and inner products.

mod checkpoint;
mod field;
mod grid;
mod random;
pub mod spectral;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use field::{ComplexField2D, RealField2D, SampledField, SystemState, VectorField2D};
pub use grid::{Grid2D, DEFAULT_DEALIAS_FRACTION};
pub use random::random_band_limited;
pub use spectral::{spectral, Spectral};

use num_complex::Complex64;

use crate::error::Result;

/// Coordinate direction for [`spectral_derivative`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// `∫|f|²` by the trapezoidal rule.
pub fn l2_norm_sq<F: SampledField>(f: &F) -> f64 {
    f.grid().cell_area() * f.modulus_sq().iter().sum::<f64>()
}

/// `∫|f|²`, rejecting non-finite samples.
pub fn try_l2_norm_sq<F: SampledField>(f: &F) -> Result<f64> {
    f.check_finite()?;
    Ok(l2_norm_sq(f))
}

/// `∫|f|⁴` by pointwise quadrature.
pub fn l4_norm_4<F: SampledField>(f: &F) -> Result<f64> {
    f.check_finite()?;
    Ok(f.grid().cell_area() * f.modulus_sq().iter().map(|m| m * m).sum::<f64>())
}

/// `∫|∇f|²` from the spectrum: `(L²/N²) Σ |k|²|f̂(k)|²`.
pub fn gradient_norm_sq<F: SampledField>(f: &F) -> Result<f64> {
    f.check_finite()?;
    Ok(gradient_norm_sq_unchecked(f.grid(), f.to_complex()))
}

pub(crate) fn gradient_norm_sq_unchecked(grid: &Grid2D, mut data: Vec<Complex64>) -> f64 {
    let sp = spectral(grid);
    sp.forward(&mut data);
    let n = grid.len() as f64;
    let w = grid.cell_area() / n;
    data.iter()
        .enumerate()
        .map(|(i, z)| sp.k_sq(i) * z.norm_sqr())
        .sum::<f64>()
        * w
}

/// `∫|f|²` evaluated on the spectral side (Parseval).
pub fn spectral_l2_norm_sq<F: SampledField>(f: &F) -> f64 {
    let grid = *f.grid();
    let mut data = f.to_complex();
    spectral(&grid).forward(&mut data);
    grid.cell_area() / grid.len() as f64 * data.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Fraction of `∫|∇f|²` carried by modes inside the dealiasing band.
///
/// Returns 1 for a field with zero gradient.
pub fn band_energy_fraction(fields: &[&ComplexField2D]) -> f64 {
    let mut inside = 0.0;
    let mut total = 0.0;
    for f in fields {
        let sp = spectral(f.grid());
        let mut data = f.to_complex();
        sp.forward(&mut data);
        for (i, z) in data.iter().enumerate() {
            let e = sp.k_sq(i) * z.norm_sqr();
            total += e;
            if sp.in_band(i) {
                inside += e;
            }
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        1.0
    }
}

/// Exact derivative of the trigonometric interpolant along `axis`.
pub fn spectral_derivative<F: SampledField>(f: &F, axis: Axis) -> Result<F> {
    f.check_finite()?;
    let grid = *f.grid();
    let sp = spectral(&grid);
    let mut data = f.to_complex();
    sp.forward(&mut data);
    apply_multiplier(&sp, &grid, &mut data, |kx, ky| {
        let k = match axis {
            Axis::X => kx,
            Axis::Y => ky,
        };
        Complex64::new(0.0, k)
    }, true);
    sp.inverse(&mut data);
    Ok(F::from_complex(grid, data))
}

/// Second derivative `∂²/∂axis²` applied in one spectral multiplication.
pub fn spectral_second_derivative<F: SampledField>(f: &F, axis: Axis) -> Result<F> {
    f.check_finite()?;
    let grid = *f.grid();
    let sp = spectral(&grid);
    let mut data = f.to_complex();
    sp.forward(&mut data);
    apply_multiplier(&sp, &grid, &mut data, |kx, ky| {
        let k = match axis {
            Axis::X => kx,
            Axis::Y => ky,
        };
        Complex64::new(-k * k, 0.0)
    }, false);
    sp.inverse(&mut data);
    Ok(F::from_complex(grid, data))
}

/// Spectral Laplacian `Δf`.
pub fn laplacian<F: SampledField>(f: &F) -> Result<F> {
    f.check_finite()?;
    let grid = *f.grid();
    Ok(F::from_complex(grid, laplacian_raw(&grid, f.to_complex())))
}

pub(crate) fn laplacian_raw(grid: &Grid2D, mut data: Vec<Complex64>) -> Vec<Complex64> {
    let sp = spectral(grid);
    sp.forward(&mut data);
    for (i, z) in data.iter_mut().enumerate() {
        *z *= -sp.k_sq(i);
    }
    sp.inverse(&mut data);
    data
}

/// Multiply spectral data by `m(kx, ky)`; `odd` selects Nyquist-free wavenumbers.
pub(crate) fn apply_multiplier(
    sp: &Spectral,
    grid: &Grid2D,
    hat: &mut [Complex64],
    m: impl Fn(f64, f64) -> Complex64,
    odd: bool,
) {
    let (kx, ky) = if odd {
        (sp.kx_odd(), sp.ky_odd())
    } else {
        (sp.kx(), sp.ky())
    };
    let nx = grid.nx();
    for (i, z) in hat.iter_mut().enumerate() {
        *z *= m(kx[i % nx], ky[i / nx]);
    }
}

/// Gradient of a real field as a vector field.
pub fn gradient(f: &RealField2D) -> Result<VectorField2D> {
    VectorField2D::new(
        spectral_derivative(f, Axis::X)?,
        spectral_derivative(f, Axis::Y)?,
    )
}

/// Divergence of a vector field.
pub fn divergence(v: &VectorField2D) -> Result<RealField2D> {
    let dx = spectral_derivative(&v.vx, Axis::X)?;
    let dy = spectral_derivative(&v.vy, Axis::Y)?;
    Ok(RealField2D::from_raw(
        *dx.grid(),
        dx.values().iter().zip(dy.values()).map(|(a, b)| a + b).collect(),
    ))
}

/// `∫ f ḡ` by quadrature.
pub fn inner_product(f: &ComplexField2D, g: &ComplexField2D) -> Complex64 {
    let s: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b.conj())
        .sum();
    s * f.grid().cell_area()
}

/// Fraction of `∫|f|²` located within distance `L/4` of the box boundary.
pub fn boundary_mass_fraction<F: SampledField>(f: &F) -> f64 {
    let g = *f.grid();
    let m = f.modulus_sq();
    let quarter = 0.25 * g.side();
    let mut edge = 0.0;
    let mut total = 0.0;
    for (i, (x, y)) in g.points().enumerate() {
        total += m[i];
        let to_edge = (0.5 * g.side() - x.abs()).min(0.5 * g.side() - y.abs());
        if to_edge < quarter {
            edge += m[i];
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}
