mod common;

use mzk::fields::{random_band_limited, ComplexField2D, Grid2D};
use mzk::groundstate::{gn_check, pohozaev_check, reference_q, reference_q_mass, solve_q};
use mzk::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn q_matches_rk4_bisection_oracle() {
    let q0 = common::oracle_q0();
    let mass = common::oracle_q_mass(q0);
    let q = reference_q();
    assert!((q.value_at_origin() - q0).abs() < 1e-8, "{} vs {q0}", q.value_at_origin());
    assert!((q.mass() - mass).abs() / mass < 1e-6, "{} vs {mass}", q.mass());
}

#[test]
fn oracle_agrees_with_published_digits() {
    let q0 = common::oracle_q0();
    assert!((q0 - 2.206200864650715).abs() < 1e-9);
    assert!((common::oracle_q_mass(q0) - 11.700896524533464).abs() < 1e-6);
}

#[test]
fn pohozaev_defects_small() {
    let p = pohozaev_check(reference_q());
    assert!(p.mass.abs() < 1e-6 && p.gradient.abs() < 1e-6, "{p:?}");
}

#[test]
fn coarser_solve_is_close() {
    let q = solve_q(16.0, 2001, 1e-10).unwrap();
    assert!((q.value_at_origin() - reference_q().value_at_origin()).abs() < 1e-7);
}

#[test]
fn gn_equality_at_sampled_q() {
    let grid = Grid2D::new(256, 256, 30.0).unwrap();
    let c = gn_check(&reference_q().to_complex_field(grid, 1.0), reference_q_mass()).unwrap();
    assert!((c.lhs / c.rhs - 1.0).abs() < 1e-4, "{c:?}");
}

#[test]
fn gn_holds_on_random_fields() {
    let grid = Grid2D::new(64, 64, 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let u = random_band_limited(grid, 6, &mut rng);
        assert!(gn_check(&u, reference_q_mass()).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Gaussians with a phase are close to the extremal; the ratio stays below one.
    #[test]
    fn gn_holds_on_gaussians(a in 0.1f64..5.0, w in 0.6f64..2.5, kx in -2.0f64..2.0, ex in 0.5f64..2.0) {
        let grid = Grid2D::new(64, 64, 24.0).unwrap();
        let u = ComplexField2D::from_fn(grid, |x, y| {
            Complex64::from_polar(a * (-(x * x / ex + y * y * ex) / (w * w)).exp(), kx * x)
        });
        let c = gn_check(&u, reference_q_mass()).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    // Scaling u(x) -> a u(bx) multiplies both sides by a⁴.
    #[test]
    fn gn_ratio_is_amplitude_invariant(a in 0.1f64..10.0) {
        let grid = Grid2D::new(32, 32, 16.0).unwrap();
        let u = ComplexField2D::from_fn(grid, |x, y| Complex64::new((-(x * x + y * y) / 3.0).exp(), 0.2 * x * (-(x * x + y * y) / 2.0).exp()));
        let c1 = gn_check(&u, 11.7).unwrap();
        let c2 = gn_check(&u.scale(Complex64::new(a, 0.0)), 11.7).unwrap();
        prop_assert!((c1.lhs / c1.rhs - c2.lhs / c2.rhs).abs() < 1e-12);
    }
}
