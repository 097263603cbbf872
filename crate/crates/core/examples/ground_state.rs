//! Solve for the Townes profile Q and print its invariants, the Pohozaev defects
//! and the mass window for a few couplings.

use mzk::groundstate::{solve_q, threshold_window, GroundStateSummary};

fn main() -> mzk::Result<()> {
    let q = solve_q(20.0, 4001, 1e-12)?;
    let s = GroundStateSummary::of(&q);
    println!("Q(0)            = {:.15}", s.q0);
    println!("||Q||^2         = {:.15}", s.mass);
    println!("||grad Q||^2    = {:.15}", s.grad_norm_sq);
    println!("Pohozaev        = {:.3e}, {:.3e}", s.pohozaev_defects[0], s.pohozaev_defects[1]);
    println!("ODE residual    = {:.3e}", s.ode_residual);
    println!("Q(r_max)/Q(0)   = {:.3e}", s.tail_ratio);
    for r in [0.0, 1.0, 2.0, 4.0, 8.0] {
        println!("  Q({r:>3}) = {:.12e}", q.eval(r));
    }
    for eta in [0.5, 1.0, 2.0] {
        let w = threshold_window(eta, s.mass)?;
        println!("eta = {eta}: blow-up window ({:.6}, {:.6})", w.lower, w.upper);
    }
    Ok(())
}
