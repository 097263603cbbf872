//! Sample the explicit self-similar family built on the limit profile and check
//! that `(T - t)` times each norm stays constant while `‖n(t)‖` fits `c/(T - t)`.

use mzk::analysis::{check_lower_bound, fit_rate, FitModel, FitOptions, NormKind, DEFAULT_EXPONENT_TOLERANCE};
use mzk::fields::Grid2D;
use mzk::groundstate::reference_q;
use mzk::selfsimilar::{scaling_check, seeded_profile, ExplicitSolution};

fn main() -> mzk::Result<()> {
    let (omega, eta, t_blow) = (20.0, 1.0, 1.0);
    let sol = ExplicitSolution::new(seeded_profile(reference_q(), omega, eta)?, t_blow, 0.0)?;
    let times: Vec<f64> = (0..12).map(|k| 0.5 + 0.25 * k as f64 / 11.0).collect();
    // The box holds the widest profile out to ρ = 12.
    let side = 24.0 * (t_blow - times[0]) / omega;
    let grid = Grid2D::new(256, 256, side)?;

    let report = scaling_check(&sol, &times, grid)?;
    println!("{:>8} {:>22} {:>22} {:>22} {:>22}", "t", "(T-t)|grad E1|", "(T-t)|grad E2|", "(T-t)|n|", "(T-t)|v|");
    for r in &report.rows {
        println!(
            "{:8.4} {:22.15e} {:22.15e} {:22.15e} {:22.15e}",
            r.t, r.tau_grad_e1, r.tau_grad_e2, r.tau_n, r.tau_v
        );
    }
    println!("column spreads (max/min - 1): {:?}", report.spreads.map(|s| format!("{s:.3e}")));
    println!("mass spread {:.3e}, lambda*(T-t) spread {:.3e}", report.mass_spread, report.lambda_spread);
    println!("H*(T-t)^2 spread {:.3e}", report.hamiltonian_spread);
    println!("|grad E1|/|grad E2| - 1: {:.3e}", report.grad_ratio_defect);
    for (t, w) in &report.warnings {
        println!("warning at t = {t}: {w}");
    }

    let series: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.t, r.tau_n / (t_blow - r.t))).collect();
    let opts = FitOptions { tail_fraction: 1.0, ..FitOptions::default() };
    let fit = fit_rate(&series, FitModel::FreeExponent, &opts);
    if let Ok(f) = &fit {
        println!("fit of |n(t)|: exponent {:.6}, T_est {:.6}, c {:.6}", f.exponent, f.t_est, f.c);
    }
    let verdict = check_lower_bound(&fit, NormKind::NNorm, None, DEFAULT_EXPONENT_TOLERANCE);
    println!("lower-bound verdict: {} ({})", verdict.status, verdict.note);
    Ok(())
}
