//! Dormand–Prince 5(4) with embedded error control, for small fixed-size systems.

/// Outcome of [`Dopri5::advance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Advance<const D: usize, E> {
    Reached([f64; D]),
    Stopped { r: f64, y: [f64; D], event: E },
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Last accepted step size, reused as the next trial step.
    pub h: f64,
    pub max_steps: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64, h_max: f64) -> Self {
        Self {
            rtol,
            atol,
            h_max,
            h: h_max.min(1e-3),
            max_steps: 1_000_000,
        }
    }

    fn try_step<const D: usize>(
        f: &impl Fn(f64, &[f64; D]) -> [f64; D],
        r: f64,
        y: &[f64; D],
        h: f64,
    ) -> ([f64; D], [f64; D]) {
        let mut k = [[0.0; D]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for d in 0..D {
                        ys[d] += h * a * kj[d];
                    }
                }
            }
            k[s] = f(r + C[s] * h, &ys);
        }
        let mut y5 = *y;
        let mut err = [0.0; D];
        for s in 0..7 {
            for d in 0..D {
                y5[d] += h * B5[s] * k[s][d];
                err[d] += h * (B5[s] - B4[s]) * k[s][d];
            }
        }
        (y5, err)
    }

    /// Integrate from `r0` to `r1`; `event` is checked after every accepted step.
    pub fn advance<const D: usize, E>(
        &mut self,
        f: impl Fn(f64, &[f64; D]) -> [f64; D],
        r0: f64,
        y0: [f64; D],
        r1: f64,
        mut event: impl FnMut(f64, &[f64; D]) -> Option<E>,
    ) -> Option<Advance<D, E>> {
        let mut r = r0;
        let mut y = y0;
        let mut steps = 0;
        while r < r1 {
            if steps >= self.max_steps {
                return None;
            }
            steps += 1;
            let last = self.h >= r1 - r;
            let h = if last { r1 - r } else { self.h };
            let (y5, err) = Self::try_step(&f, r, &y, h);
            let mut e2: f64 = 0.0;
            for d in 0..D {
                let sc = self.atol + self.rtol * y[d].abs().max(y5[d].abs());
                e2 += (err[d] / sc).powi(2);
            }
            let e = (e2 / D as f64).sqrt();
            if !e.is_finite() {
                self.h *= 0.1;
                continue;
            }
            let factor = if e == 0.0 {
                5.0
            } else {
                (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
            };
            if e <= 1.0 {
                r = if last { r1 } else { r + h };
                y = y5;
                if !last {
                    self.h = (h * factor).min(self.h_max);
                }
                if let Some(ev) = event(r, &y) {
                    return Some(Advance::Stopped { r, y, event: ev });
                }
            } else {
                self.h = h * factor;
            }
        }
        Some(Advance::Reached(y))
    }
}

/// Modified Bessel functions `(K0(r), K1(r))` for `r > 0`, from
/// `K_ν(r) = ∫_0^∞ exp(-r cosh t) cosh(νt) dt` by the trapezoidal rule, which
/// converges geometrically for this analytic, rapidly decaying integrand.
pub fn bessel_k0_k1(r: f64) -> (f64, f64) {
    let h = 0.02;
    let t_max = (750.0 / r).max(1.0).acosh() + 1.0;
    let n = (t_max / h).ceil() as usize;
    let mut k0 = 0.5 * (-r).exp();
    let mut k1 = k0;
    for i in 1..=n {
        let t = i as f64 * h;
        let c = t.cosh();
        let e = (-r * c).exp();
        k0 += e;
        k1 += e * c;
    }
    (k0 * h, k1 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let mut s = Dopri5::new(1e-12, 1e-14, 0.1);
        let out = s.advance(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            |_, _| None::<()>,
        );
        match out {
            Some(Advance::Reached(y)) => {
                assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10, "{y:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn event_stops_integration() {
        let mut s = Dopri5::new(1e-10, 1e-12, 0.01);
        let out = s.advance(|_, _: &[f64; 1]| [-1.0], 0.0, [1.0], 5.0, |_, y| (y[0] < 0.0).then_some(7));
        match out {
            Some(Advance::Stopped { r, event, .. }) => {
                assert_eq!(event, 7);
                assert!((r - 1.0).abs() < 0.011);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun table 9.8.
        let (k0, k1) = bessel_k0_k1(1.0);
        assert!((k0 - 0.421_024_438_240_708_2).abs() < 1e-14);
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-14);
        let (k0, k1) = bessel_k0_k1(10.0);
        assert!((k0 / 1.778_006_231_616_765e-5 - 1.0).abs() < 1e-10);
        assert!((k1 / 1.864_877_345_382_558_5e-5 - 1.0).abs() < 1e-10);
    }
}
