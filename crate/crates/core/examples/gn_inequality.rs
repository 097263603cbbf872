//! Check the sharp Gagliardo-Nirenberg inequality on random band-limited fields
//! and its equality case on Q sampled to a grid.

use mzk::fields::{random_band_limited, Grid2D};
use mzk::groundstate::{gn_check, reference_q, reference_q_mass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mzk::Result<()> {
    let q_mass = reference_q_mass();
    let grid = Grid2D::new(64, 64, 20.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = random_band_limited(grid, 8, &mut rng);
        let c = gn_check(&u, q_mass)?;
        assert!(c.holds);
        worst = worst.max(c.lhs / c.rhs);
    }
    println!("100 random fields: largest lhs/rhs = {worst:.6}");

    let fine = Grid2D::new(256, 256, 30.0)?;
    let qf = reference_q().to_complex_field(fine, 1.0);
    let c = gn_check(&qf, q_mass)?;
    println!("Q on {}x{}: lhs = {:.12}, rhs = {:.12}, 1 - lhs/rhs = {:.3e}", fine.nx(), fine.ny(), c.lhs, c.rhs, 1.0 - c.lhs / c.rhs);
    Ok(())
}
