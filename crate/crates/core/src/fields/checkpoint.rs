//! MZKV1 checkpoint files.
//!
//! Layout: the five magic bytes `MZKV1`, then little-endian `u32 nx`, `u32 ny`,
//! `f64 L`, `f64 t`, followed by row-major arrays `E1` (interleaved re/im),
//! `E2` (same), `n`, `vx`, `vy`, all `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{ComplexField2D, Grid2D, RealField2D, SystemState, VectorField2D};
use crate::error::{MzkError, Result};

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"MZKV1";

pub fn write_checkpoint<W: Write>(mut w: W, state: &SystemState) -> Result<()> {
    let g = state.grid();
    let mut buf = Vec::with_capacity(5 + 24 + g.len() * 7 * 8);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    buf.extend_from_slice(&g.side().to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    for f in [&state.e1, &state.e2] {
        for z in f.values() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    for f in [&state.n, &state.v.vx, &state.v.vy] {
        for x in f.values() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(MzkError::Format(format!(
                "truncated file: need {} bytes at offset {}, have {}",
                n,
                self.pos,
                self.bytes.len()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn reals(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }

    fn complexes(&mut self, n: usize) -> Result<Vec<Complex64>> {
        (0..n)
            .map(|_| Ok(Complex64::new(self.f64()?, self.f64()?)))
            .collect()
    }
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<SystemState> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if c.take(5)? != CHECKPOINT_MAGIC {
        return Err(MzkError::Format("bad magic, expected MZKV1".into()));
    }
    let nx = c.u32()? as usize;
    let ny = c.u32()? as usize;
    let side = c.f64()?;
    let t = c.f64()?;
    let grid = Grid2D::new(nx, ny, side)?;
    let n = grid.len();
    let e1 = ComplexField2D::new(grid, c.complexes(n)?)?;
    let e2 = ComplexField2D::new(grid, c.complexes(n)?)?;
    let dens = RealField2D::new(grid, c.reals(n)?)?;
    let vx = RealField2D::new(grid, c.reals(n)?)?;
    let vy = RealField2D::new(grid, c.reals(n)?)?;
    if c.pos != bytes.len() {
        return Err(MzkError::Format(format!(
            "{} trailing bytes after field data",
            bytes.len() - c.pos
        )));
    }
    SystemState::new(e1, e2, dens, VectorField2D::new(vx, vy)?, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = Grid2D::new(4, 2, 3.5).unwrap();
        let mut st = SystemState::zeros(g);
        st.t = 0.25;
        let mut out = Vec::new();
        write_checkpoint(&mut out, &st).unwrap();
        assert_eq!(&out[..5], b"MZKV1");
        assert_eq!(u32::from_le_bytes(out[5..9].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(out[9..13].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(out[13..21].try_into().unwrap()), 3.5);
        assert_eq!(f64::from_le_bytes(out[21..29].try_into().unwrap()), 0.25);
        assert_eq!(out.len(), 29 + 8 * 8 * 7);
    }

    #[test]
    fn round_trip_preserves_bits() {
        let g = Grid2D::new(8, 4, 2.0).unwrap();
        let e1 = ComplexField2D::from_fn(g, |x, y| Complex64::new(x.sin(), y * 0.3));
        let e2 = ComplexField2D::from_fn(g, |x, y| Complex64::new(x * y, -1.0 / 3.0));
        let n = RealField2D::from_fn(g, |x, y| (x + 2.0 * y).cos());
        let v = VectorField2D::new(RealField2D::from_fn(g, |x, _| x), RealField2D::from_fn(g, |_, y| y))
            .unwrap();
        let st = SystemState::new(e1, e2, n, v, 1.0 / 7.0).unwrap();
        let mut out = Vec::new();
        write_checkpoint(&mut out, &st).unwrap();
        let back = read_checkpoint(&out[..]).unwrap();
        assert_eq!(back, st);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let st = SystemState::zeros(Grid2D::new(2, 2, 1.0).unwrap());
        let mut out = Vec::new();
        write_checkpoint(&mut out, &st).unwrap();
        let mut bad = out.clone();
        bad[4] = b'2';
        assert!(matches!(read_checkpoint(&bad[..]), Err(MzkError::Format(_))));
        assert!(matches!(read_checkpoint(&out[..out.len() - 3]), Err(MzkError::Format(_))));
    }
}
