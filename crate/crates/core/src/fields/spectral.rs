//! 2D FFTs, wavenumber tables and spectral operators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid2D;

/// FFT plans and wavenumber tables for one grid shape.
///
/// Plans are shared through a global cache; every transform works row by row, so
/// results do not depend on how many rayon workers execute it.
pub struct Spectral {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    /// Full wavenumbers, Nyquist mapped to `-N/2`.
    kx: Vec<f64>,
    ky: Vec<f64>,
    /// Wavenumbers for odd-order derivatives (Nyquist zeroed).
    kx_odd: Vec<f64>,
    ky_odd: Vec<f64>,
    keep_x: Vec<bool>,
    keep_y: Vec<bool>,
}

type PlanKey = (usize, usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<PlanKey, Arc<Spectral>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<Spectral>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared spectral machinery for `grid`.
pub fn spectral(grid: &Grid2D) -> Arc<Spectral> {
    let key = (
        grid.nx(),
        grid.ny(),
        grid.side().to_bits(),
        grid.dealias_fraction().to_bits(),
    );
    let mut map = cache().lock().expect("spectral cache poisoned");
    map.entry(key)
        .or_insert_with(|| Arc::new(Spectral::build(grid)))
        .clone()
}

/// Signed mode index for FFT slot `i` of an `n`-point transform.
#[inline]
pub fn mode_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn wavenumbers(n: usize, side: f64) -> (Vec<f64>, Vec<f64>) {
    let base = 2.0 * std::f64::consts::PI / side;
    let full: Vec<f64> = (0..n).map(|i| base * mode_index(i, n) as f64).collect();
    let odd = full
        .iter()
        .enumerate()
        .map(|(i, &k)| if i == n / 2 { 0.0 } else { k })
        .collect();
    (full, odd)
}

fn keep_mask(n: usize, fraction: f64) -> Vec<bool> {
    let cutoff = fraction * n as f64 / 2.0;
    (0..n)
        .map(|i| (mode_index(i, n).unsigned_abs() as f64) < cutoff)
        .collect()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
}

fn rows_fft(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) {
    // Batch several rows per task; each row is transformed independently.
    let rows_per_task = (4096 / n).max(1);
    data.par_chunks_mut(n * rows_per_task)
        .for_each(|chunk| fft.process(chunk));
}

impl Spectral {
    fn build(grid: &Grid2D) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let mut planner = FftPlanner::new();
        let (kx, kx_odd) = wavenumbers(nx, grid.side());
        let (ky, ky_odd) = wavenumbers(ny, grid.side());
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            kx,
            ky,
            kx_odd,
            ky_odd,
            keep_x: keep_mask(nx, grid.dealias_fraction()),
            keep_y: keep_mask(ny, grid.dealias_fraction()),
        }
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.nx * self.ny, "buffer does not match grid");
        let (fx, fy) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        rows_fft(fx, data, self.nx);
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, self.ny, self.nx);
        rows_fft(fy, &mut t, self.ny);
        transpose(&t, data, self.nx, self.ny);
    }

    /// Unnormalised forward DFT in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// Inverse DFT in place, including the `1/(nx·ny)` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, false);
        let s = 1.0 / (self.nx * self.ny) as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    pub fn kx_odd(&self) -> &[f64] {
        &self.kx_odd
    }

    pub fn ky_odd(&self) -> &[f64] {
        &self.ky_odd
    }

    /// `|k|²` for storage slot `idx` (full wavenumbers).
    #[inline]
    pub fn k_sq(&self, idx: usize) -> f64 {
        let (ix, iy) = (idx % self.nx, idx / self.nx);
        self.kx[ix] * self.kx[ix] + self.ky[iy] * self.ky[iy]
    }

    /// Whether slot `idx` lies inside the dealiasing band.
    #[inline]
    pub fn in_band(&self, idx: usize) -> bool {
        self.keep_x[idx % self.nx] && self.keep_y[idx / self.nx]
    }

    /// Zero every mode outside the dealiasing band (spectral data).
    pub fn truncate(&self, hat: &mut [Complex64]) {
        hat.par_iter_mut().enumerate().for_each(|(i, z)| {
            if !self.in_band(i) {
                *z = Complex64::new(0.0, 0.0);
            }
        });
    }
}
