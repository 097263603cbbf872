use num_complex::Complex64;
use rand::Rng;

use super::{spectral, spectral::mode_index, ComplexField2D, Grid2D};

/// Random trigonometric polynomial with modes `|mx|, |my| <= max_mode`, each
/// coefficient uniform in the unit square.
pub fn random_band_limited<R: Rng + ?Sized>(grid: Grid2D, max_mode: usize, rng: &mut R) -> ComplexField2D {
    let sp = spectral(&grid);
    let (nx, ny) = (grid.nx(), grid.ny());
    let m = max_mode as i64;
    let mut hat = vec![Complex64::new(0.0, 0.0); grid.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            if mode_index(ix, nx).abs() <= m && mode_index(iy, ny).abs() <= m {
                hat[iy * nx + ix] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    sp.inverse(&mut hat);
    ComplexField2D::from_raw(grid, hat)
}
