//! Integrate smooth non-radial data and report mass and Hamiltonian drift for
//! two step sizes; the Hamiltonian drift should shrink about 4x when dt halves.

use mzk::dynamics::{run, StepperConfig};
use mzk::fields::{ComplexField2D, Grid2D, RealField2D, SystemState, VectorField2D};
use mzk::Complex64;

fn initial(grid: Grid2D) -> mzk::Result<SystemState> {
    let g = |x: f64, y: f64, s: f64| (-(x * x + y * y) / s).exp();
    let e1 = ComplexField2D::from_fn(grid, |x, y| Complex64::new(0.8 * g(x - 0.5, y, 4.0), 0.3 * x * g(x, y, 3.0)));
    let e2 = ComplexField2D::from_fn(grid, |x, y| Complex64::new(0.2 * y * g(x, y, 5.0), -0.5 * g(x, y + 0.7, 3.0)));
    let n = RealField2D::from_fn(grid, |x, y| -0.3 * g(x, y, 6.0));
    let v = VectorField2D::new(
        RealField2D::from_fn(grid, |x, y| 0.1 * x * g(x, y, 5.0)),
        RealField2D::from_fn(grid, |x, y| 0.1 * y * g(x, y, 5.0)),
    )?;
    SystemState::new(e1, e2, n, v, 0.0)
}

fn main() -> mzk::Result<()> {
    let grid = Grid2D::new(128, 128, 24.0)?;
    let st = initial(grid)?;
    let mut drifts = Vec::new();
    let horizon = 4.0;
    for dt in [0.004, 0.002] {
        let traj = run(&st, &StepperConfig::new(dt, 1.0), horizon)?;
        let d0 = traj.diagnostics[0];
        let mass = traj.diagnostics.iter().map(|d| ((d.mass - d0.mass) / d0.mass).abs()).fold(0.0, f64::max);
        let ham = traj.diagnostics.iter().map(|d| (d.hamiltonian - d0.hamiltonian).abs()).fold(0.0, f64::max);
        println!("dt = {dt}: {} steps, max mass drift {mass:.3e}, max |H - H0| {ham:.3e}", traj.diagnostics.len() - 1);
        drifts.push(ham);
    }
    println!("Hamiltonian drift ratio {:.3}", drifts[0] / drifts[1]);
    Ok(())
}
