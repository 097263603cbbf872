//! Run a short trajectory, then check the energy-norm rescaling identities at each
//! stored snapshot and the residual of the rescaled system on a window of steps.

use mzk::dynamics::{residual_centered, run_with_options, step, RunOptions, StepperConfig};
use mzk::fields::{ComplexField2D, Grid2D, RealField2D, SystemState, VectorField2D};
use mzk::rescale::{identity_rows, rescale_window, rescaled_residual};
use mzk::Complex64;

fn main() -> mzk::Result<()> {
    let grid = Grid2D::new(64, 64, 16.0)?;
    let e1 = ComplexField2D::from_fn(grid, |x, y| Complex64::new(1.2 * (-(x * x + y * y) / 2.0).exp(), 0.0));
    let e2 = e1.scale(Complex64::new(0.0, -0.7));
    let st = SystemState::new(e1, e2, RealField2D::zeros(grid), VectorField2D::zeros(grid), 0.0)?;
    let cfg = StepperConfig::new(1e-3, 1.0);
    let traj = run_with_options(&st, &cfg, 0.5, &RunOptions { checkpoint_interval: Some(0.1), ..Default::default() })?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "lambda", "energy-1", "mass", "H scaling");
    for r in identity_rows(&traj.checkpoints, cfg.eta)? {
        println!(
            "{:6.3} {:12.6} {:12.3e} {:12.3e} {:12.3e}",
            r.t, r.lambda, r.identity_2_5_defect, r.mass_defect, r.hamiltonian_scaling_defect
        );
    }

    // Three consecutive steps, transformed with the first snapshot's λ: the
    // rescaled residual is pointwise the original one times λ⁻³, so its L2 norm
    // over the stretched box carries λ⁻².
    let mut window = vec![traj.final_state.clone()];
    for _ in 0..2 {
        let next = step(window.last().unwrap(), &cfg)?;
        window.push(next);
    }
    let rescaled = rescale_window(&window, 0)?;
    let res = rescaled_residual(&rescaled, cfg.eta)?[0];
    let orig = residual_centered(&window[0], &window[1], &window[2], cfg.eta)?.l2_norms();
    let lam2 = rescaled[0].lambda.powi(2);
    println!("rescaled residual L2 norms:        {:?}", res.map(|x| format!("{x:.6e}")));
    println!("original residual norms / lambda^2: {:?}", orig.map(|x| format!("{:.6e}", x / lam2)));
    Ok(())
}
