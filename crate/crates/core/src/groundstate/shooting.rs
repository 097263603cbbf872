//! Bisection shooting for `Q'' + Q'/r - Q + Q³ = 0`, `Q'(0) = 0`, `Q → 0`.

use super::ode::{bessel_k0_k1, Advance, Dopri5};
use super::radial::RadialProfile;
use crate::error::{MzkError, Result};

const BRACKET: (f64, f64) = (1.0, 4.0);
const RTOL: f64 = 1e-13;
const ATOL: f64 = 1e-16;
/// Relative disagreement of the two bracket trajectories beyond which the
/// integrated profile is replaced by the linearised `C·K0(r)` tail.
const MATCH_TOL: f64 = 1e-8;
/// Below this radius `Q²` is too large for the linear tail to be accurate.
const MIN_MATCH_RADIUS: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shot {
    /// Profile crossed zero: initial value too large.
    Crossed,
    /// Profile turned upward (or never decayed): initial value too small.
    TurnedUp,
}

fn rhs(r: f64, y: &[f64; 2]) -> [f64; 2] {
    let (q, dq) = (y[0], y[1]);
    let source = q - q * q * q;
    if r == 0.0 {
        [dq, 0.5 * source]
    } else {
        [dq, source - dq / r]
    }
}

fn stepper(h_max: f64) -> Dopri5 {
    let mut s = Dopri5::new(RTOL, ATOL, h_max);
    s.h = 1e-3;
    s
}

fn classify_event(r: f64, y: &[f64; 2]) -> Option<Shot> {
    if y[0] < 0.0 {
        Some(Shot::Crossed)
    } else if r > 0.0 && y[1] > 0.0 {
        Some(Shot::TurnedUp)
    } else {
        None
    }
}

fn shoot(a: f64, r_max: f64) -> Result<Shot> {
    let mut s = stepper(0.05);
    match s.advance(rhs, 0.0, [a, 0.0], r_max, classify_event) {
        Some(Advance::Stopped { event, .. }) => Ok(event),
        // Survived to r_max without crossing or turning: it has not decayed
        // to zero (e.g. the constant solution Q ≡ 1), so it is too small.
        Some(Advance::Reached(_)) => Ok(Shot::TurnedUp),
        None => Err(MzkError::solver("ODE stepper exceeded its step budget", vec![("Q0", a)])),
    }
}

/// Integrate from `a` onto the uniform grid, stopping at the first event.
fn trajectory(a: f64, grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut s = stepper(grid[1] - grid[0]);
    let mut q = vec![a];
    let mut dq = vec![0.0];
    let mut y = [a, 0.0];
    for w in grid.windows(2) {
        match s.advance(rhs, w[0], y, w[1], |_, _| None::<()>) {
            Some(Advance::Reached(next)) if next[0] > 0.0 && next[1] <= 0.0 => {
                y = next;
                q.push(y[0]);
                dq.push(y[1]);
            }
            _ => break,
        }
    }
    (q, dq)
}

/// Ground state `Q` of `-ΔQ + Q = Q³` on `[0, r_max]` with `n_points` samples.
///
/// The central value is found by bisection on `Q(0) ∈ [1, 4]` until the bracket
/// is below `tol` (and then down to machine resolution). Shooting cannot follow
/// the decaying branch to large `r` in floating point, so the profile is integrated
/// from both bracket ends and, from the radius where they disagree, continued
/// with the linearised tail `C·K0(r)`.
pub fn solve_q(r_max: f64, n_points: usize, tol: f64) -> Result<RadialProfile> {
    if !(r_max >= 15.0 && r_max.is_finite()) {
        return Err(MzkError::Domain {
            name: "r_max",
            value: r_max,
            reason: "must be >= 15",
        });
    }
    if n_points < 2000 {
        return Err(MzkError::Domain {
            name: "n_points",
            value: n_points as f64,
            reason: "must be >= 2000",
        });
    }
    if !(tol > 0.0 && tol <= 1e-10) {
        return Err(MzkError::Domain {
            name: "tol",
            value: tol,
            reason: "must lie in (0, 1e-10]",
        });
    }

    let (mut lo, mut hi) = BRACKET;
    let (s_lo, s_hi) = (shoot(lo, r_max)?, shoot(hi, r_max)?);
    if s_lo != Shot::TurnedUp || s_hi != Shot::Crossed {
        return Err(MzkError::solver(
            "shooting bracket does not straddle the ground state",
            vec![
                ("lo", lo),
                ("lo_crossed", (s_lo == Shot::Crossed) as u8 as f64),
                ("hi", hi),
                ("hi_crossed", (s_hi == Shot::Crossed) as u8 as f64),
            ],
        ));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid, r_max)? {
            Shot::Crossed => hi = mid,
            Shot::TurnedUp => lo = mid,
        }
    }
    debug_assert!(hi - lo <= tol);

    let h = r_max / (n_points - 1) as f64;
    let r: Vec<f64> = (0..n_points).map(|i| i as f64 * h).collect();
    let (q_lo, dq_lo) = trajectory(lo, &r);
    let (q_hi, _) = trajectory(hi, &r);
    let common = q_lo.len().min(q_hi.len());
    let matched = (1..common)
        .find(|&i| (q_hi[i] - q_lo[i]).abs() > MATCH_TOL * q_lo[i])
        .unwrap_or(common)
        - 1;
    let r_match = r[matched];
    if r_match < MIN_MATCH_RADIUS {
        return Err(MzkError::solver(
            "shooting trajectories separate before the linear tail regime",
            vec![("r_match", r_match), ("Q0_lo", lo), ("Q0_hi", hi)],
        ));
    }

    let (k0m, _) = bessel_k0_k1(r_match);
    let amp = q_lo[matched] / k0m;
    let mut values = q_lo[..=matched].to_vec();
    let mut slopes = dq_lo[..=matched].to_vec();
    for &ri in &r[matched + 1..] {
        let (k0, k1) = bessel_k0_k1(ri);
        values.push(amp * k0);
        slopes.push(-amp * k1);
    }
    let (k0, k1) = bessel_k0_k1(r_max);
    RadialProfile::new(r, values, slopes, k1 / k0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_arguments() {
        assert!(matches!(solve_q(10.0, 4000, 1e-12), Err(MzkError::Domain { name: "r_max", .. })));
        assert!(matches!(solve_q(20.0, 100, 1e-12), Err(MzkError::Domain { name: "n_points", .. })));
        assert!(matches!(solve_q(20.0, 4000, 1e-6), Err(MzkError::Domain { name: "tol", .. })));
    }

    #[test]
    fn bracket_ends_are_classified() {
        assert_eq!(shoot(1.0, 20.0).unwrap(), Shot::TurnedUp);
        assert_eq!(shoot(0.5, 20.0).unwrap(), Shot::TurnedUp);
        assert_eq!(shoot(4.0, 20.0).unwrap(), Shot::Crossed);
    }
}
