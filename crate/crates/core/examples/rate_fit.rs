//! Fit `c/(T - t)^p` to synthetic growth series and show the verdicts, including
//! a bounded series that is reported as not blowing up.

use mzk::analysis::{check_lower_bound, fit_rate, FitModel, FitOptions, NormKind, DEFAULT_EXPONENT_TOLERANCE};

fn main() {
    let opts = FitOptions::default();
    let cases: [(&str, Box<dyn Fn(f64) -> f64>); 3] = [
        ("5/(0.8-t)", Box::new(|t| 5.0 / (0.8 - t))),
        ("2/(0.8-t)^0.5", Box::new(|t| 2.0 / (0.8 - t).sqrt())),
        ("1 + 0.1 sin t", Box::new(|t: f64| 1.0 + 0.1 * t.sin())),
    ];
    for (name, f) in &cases {
        let series: Vec<(f64, f64)> = (0..200).map(|i| 0.79 * i as f64 / 199.0).map(|t| (t, f(t))).collect();
        let fit = fit_rate(&series, FitModel::FreeExponent, &opts);
        match &fit {
            Ok(r) => println!("{name:>16}: exponent {:.6}, T_est {:.6}, c {:.6}", r.exponent, r.t_est, r.c),
            Err(e) => println!("{name:>16}: {e}"),
        }
        let v = check_lower_bound(&fit, NormKind::GradE, None, DEFAULT_EXPONENT_TOLERANCE);
        println!("{:>16}  verdict: {} ({})", "", v.status, v.note);
    }
}
