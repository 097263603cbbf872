//! Least-squares fits of `y ≈ c/(T - t)^p` in log space.

use serde::Serialize;

use crate::error::{MzkError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `p = 1`
    FixedExponentOne,
    FreeExponent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Share of the series (taken from the end) entering the fit.
    pub tail_fraction: f64,
    /// Largest relative decrease between consecutive tail samples still counted as increasing.
    pub monotone_tolerance: f64,
    /// Largest accepted `(T_est - t_last) / (t_last - t_first)` over the fitted tail;
    /// beyond it the data do not point at a singular time within reach.
    pub max_extrapolation: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tail_fraction: 0.5,
            monotone_tolerance: 0.05,
            max_extrapolation: 10.0,
        }
    }
}

pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub c: f64,
    #[serde(rename = "T_est")]
    pub t_est: f64,
    pub exponent: f64,
    pub rms_log_residual: f64,
    pub samples: usize,
}

struct Inner {
    log_c: f64,
    p: f64,
    ssr: f64,
    /// `Σ res_i · p/(T - t_i)`, proportional to `dSSR/dT` at the inner optimum.
    slope: f64,
}

/// Linear least squares of `log y = log c - p log(T - t)` for fixed `T`.
fn inner(t: &[f64], z: &[f64], big_t: f64, model: FitModel) -> Inner {
    let m = t.len() as f64;
    let x: Vec<f64> = t.iter().map(|&ti| (big_t - ti).ln()).collect();
    let (log_c, p) = match model {
        FitModel::FixedExponentOne => (z.iter().zip(&x).map(|(z, x)| z + x).sum::<f64>() / m, 1.0),
        FitModel::FreeExponent => {
            let mx = x.iter().sum::<f64>() / m;
            let mz = z.iter().sum::<f64>() / m;
            let sxx: f64 = x.iter().map(|x| (x - mx) * (x - mx)).sum();
            let sxz: f64 = x.iter().zip(z).map(|(x, z)| (x - mx) * (z - mz)).sum();
            let p = -sxz / sxx;
            (mz + p * mx, p)
        }
    };
    let mut ssr = 0.0;
    let mut slope = 0.0;
    for i in 0..t.len() {
        let res = z[i] - log_c + p * x[i];
        ssr += res * res;
        slope += res * p / (big_t - t[i]);
    }
    Inner { log_c, p, ssr, slope }
}

/// Fit the tail of `series` (pairs `(t, y)`).
///
/// `T` is parametrised by `u = log(T - t_last)`; a coarse scan locates the minimum
/// of the residual sum of squares and bisection on its derivative refines it.
/// A minimum at the far end of the scan means the data do not single out a
/// finite singular time.
pub fn fit_rate(series: &[(f64, f64)], model: FitModel, opts: &FitOptions) -> Result<RateFit> {
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(MzkError::Domain {
            name: "tail_fraction",
            value: opts.tail_fraction,
            reason: "must lie in (0, 1]",
        });
    }
    let n = series.len();
    let take = ((n as f64 * opts.tail_fraction).ceil() as usize).max(MIN_FIT_SAMPLES).min(n);
    if take < MIN_FIT_SAMPLES {
        return Err(MzkError::FitFailure(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {n}"
        )));
    }
    let tail = &series[n - take..];
    let t: Vec<f64> = tail.iter().map(|p| p.0).collect();
    let y: Vec<f64> = tail.iter().map(|p| p.1).collect();
    if t.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(MzkError::FitFailure("non-finite samples".into()));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MzkError::FitFailure("sample times must be strictly increasing".into()));
    }
    if y.iter().any(|&v| v <= 0.0) {
        return Err(MzkError::FitFailure("samples must be positive".into()));
    }
    if let Some(i) = y
        .windows(2)
        .position(|w| w[1] < w[0] * (1.0 - opts.monotone_tolerance))
    {
        return Err(MzkError::FitFailure(format!(
            "non-monotone tail: y drops from {} to {} at t = {}",
            y[i], y[i + 1], t[i + 1]
        )));
    }
    if y[take - 1] <= y[0] {
        return Err(MzkError::FitFailure("not blowing up: tail does not grow".into()));
    }
    let z: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let t_last = t[take - 1];
    let span = t_last - t[0];
    let (u_lo, u_hi) = ((1e-9 * span).ln(), (1e3 * span).ln());
    const SCAN: usize = 400;
    let u_at = |k: usize| u_lo + (u_hi - u_lo) * k as f64 / (SCAN - 1) as f64;
    let eval = |u: f64| inner(&t, &z, t_last + u.exp(), model);
    let ssr: Vec<f64> = (0..SCAN).map(|k| eval(u_at(k)).ssr).collect();
    let best = (0..SCAN)
        .min_by(|&a, &b| ssr[a].total_cmp(&ssr[b]))
        .unwrap();
    if best == SCAN - 1 {
        return Err(MzkError::FitFailure(
            "not blowing up: the best singular time recedes to the end of the search range".into(),
        ));
    }
    if best == 0 {
        return Err(MzkError::FitFailure(
            "fit divergence: the singular time collapses onto the last sample".into(),
        ));
    }
    let (mut a, mut b) = (u_at(best - 1), u_at(best + 1));
    // dSSR/du has the sign of `slope`; keep a sign change inside [a, b] when one exists.
    let (sa, sb) = (eval(a).slope, eval(b).slope);
    if sa < 0.0 && sb > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if eval(mid).slope < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
    } else {
        // Flat or noisy minimum: take the scan point.
        a = u_at(best);
        b = a;
    }
    let u = 0.5 * (a + b);
    let fit = eval(u);
    if u.exp() > opts.max_extrapolation * span {
        return Err(MzkError::FitFailure(format!(
            "not blowing up: estimated singular time {} lies {} tail spans past the data",
            t_last + u.exp(),
            u.exp() / span
        )));
    }
    let rms = (fit.ssr / take as f64).sqrt();
    if !rms.is_finite() {
        return Err(MzkError::FitFailure("non-finite residual".into()));
    }
    Ok(RateFit {
        c: fit.log_c.exp(),
        t_est: t_last + u.exp(),
        exponent: fit.p,
        rms_log_residual: rms,
        samples: take,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64, t0: f64, t1: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn recovers_fixed_exponent() {
        let s = samples(|t| 5.0 / (0.8 - t), 0.0, 0.75, 40);
        let f = fit_rate(&s, FitModel::FixedExponentOne, &FitOptions::default()).unwrap();
        assert!((f.c - 5.0).abs() < 1e-10, "{f:?}");
        assert!((f.t_est - 0.8).abs() < 1e-10, "{f:?}");
        assert_eq!(f.exponent, 1.0);
    }

    #[test]
    fn recovers_free_exponent() {
        let s = samples(|t| 3.0 / (0.5 - t).powi(2), 0.0, 0.45, 40);
        let f = fit_rate(&s, FitModel::FreeExponent, &FitOptions::default()).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-8, "{f:?}");
        assert!((f.t_est - 0.5).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn bounded_series_is_not_blowing_up() {
        let s = samples(|t| 2.0 - (-t).exp(), 0.0, 10.0, 40);
        let e = fit_rate(&s, FitModel::FixedExponentOne, &FitOptions::default()).unwrap_err();
        assert!(e.to_string().contains("not blowing up"), "{e}");
        let flat = samples(|_| 1.0, 0.0, 1.0, 20);
        assert!(fit_rate(&flat, FitModel::FreeExponent, &FitOptions::default()).is_err());
    }

    #[test]
    fn too_few_samples() {
        let s = samples(|t| 1.0 / (1.0 - t), 0.0, 0.5, 7);
        assert!(matches!(
            fit_rate(&s, FitModel::FixedExponentOne, &FitOptions::default()),
            Err(MzkError::FitFailure(_))
        ));
    }
}
