//! The radial profile system
//!
//! ```text
//! ΔP - P + (η/(η+1)) P³ = (1/(η+1)) N P
//! (1/ω²)(r² N'' + 6r N' + 6N) - ΔN = Δ(P²)
//! ```
//!
//! discretised with sixth-order central differences on the ground-state grid.

use serde::Serialize;

use super::band::BandMatrix;
use crate::error::{MzkError, Result};
use crate::groundstate::RadialProfile;

/// `(P, N)` with the parameters they were computed for.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePair {
    pub p: RadialProfile,
    pub n: RadialProfile,
    /// `+∞` for the limit pair.
    pub omega: f64,
    pub eta: f64,
    /// Max-norm defects of the two profile equations.
    pub residual_norms: (f64, f64),
}

/// Sparse row of a finite-difference operator: `(column, weight)`.
type Row = Vec<(usize, f64)>;

/// Stencils on the uniform grid `r_i = i·h`, `i < n`, with even-parity ghosts
/// folded back at the origin. The order drops near the last sample, which is a
/// boundary node.
struct Stencils {
    n: usize,
    h: f64,
}

impl Stencils {
    fn fold(&self, i: usize, taps: &[(i64, f64)]) -> Row {
        taps.iter()
            .map(|&(off, w)| (((i as i64) + off).unsigned_abs() as usize, w))
            .collect()
    }

    fn d1(&self, i: usize) -> Row {
        let h = self.h;
        if i + 3 < self.n {
            let c = 1.0 / (60.0 * h);
            self.fold(i, &[(-3, -c), (-2, 9.0 * c), (-1, -45.0 * c), (1, 45.0 * c), (2, -9.0 * c), (3, c)])
        } else if i + 2 < self.n {
            let c = 1.0 / (12.0 * h);
            self.fold(i, &[(-2, c), (-1, -8.0 * c), (1, 8.0 * c), (2, -c)])
        } else {
            let c = 1.0 / (2.0 * h);
            self.fold(i, &[(-1, -c), (1, c)])
        }
    }

    fn d2(&self, i: usize) -> Row {
        let h2 = self.h * self.h;
        if i + 3 < self.n {
            let c = 1.0 / (180.0 * h2);
            self.fold(
                i,
                &[(-3, 2.0 * c), (-2, -27.0 * c), (-1, 270.0 * c), (0, -490.0 * c), (1, 270.0 * c), (2, -27.0 * c), (3, 2.0 * c)],
            )
        } else if i + 2 < self.n {
            let c = 1.0 / (12.0 * h2);
            self.fold(i, &[(-2, -c), (-1, 16.0 * c), (0, -30.0 * c), (1, 16.0 * c), (2, -c)])
        } else {
            self.fold(i, &[(-1, 1.0 / h2), (0, -2.0 / h2), (1, 1.0 / h2)])
        }
    }

    /// `f'' + f'/r`, with `2f''(0)` at the origin.
    fn laplacian(&self, i: usize) -> Row {
        if i == 0 {
            return scale(self.d2(0), 2.0);
        }
        let r = i as f64 * self.h;
        let mut row = self.d2(i);
        row.extend(scale(self.d1(i), 1.0 / r));
        row
    }

    /// `(r²/ω² - 1) f'' + (6r/ω² - 1/r) f' + (6/ω²) f`.
    fn wave(&self, i: usize, inv_w2: f64) -> Row {
        if i == 0 {
            // (A(0) - 1) f''(0) + C f(0), the f'/r term taking its limit f''(0)
            let mut row = scale(self.d2(0), -2.0);
            row.push((0, 6.0 * inv_w2));
            return row;
        }
        let r = i as f64 * self.h;
        let mut row = scale(self.d2(i), r * r * inv_w2 - 1.0);
        row.extend(scale(self.d1(i), 6.0 * r * inv_w2 - 1.0 / r));
        row.push((i, 6.0 * inv_w2));
        row
    }
}

fn scale(row: Row, s: f64) -> Row {
    row.into_iter().map(|(j, w)| (j, w * s)).collect()
}

fn apply(row: &Row, f: &[f64]) -> f64 {
    row.iter().map(|&(j, w)| w * f[j]).sum()
}

struct Discretisation {
    st: Stencils,
    inv_w2: f64,
    a: f64,
    b: f64,
}

impl Discretisation {
    fn new(n: usize, h: f64, omega: f64, eta: f64) -> Self {
        Self {
            st: Stencils { n, h },
            inv_w2: if omega.is_infinite() { 0.0 } else { 1.0 / (omega * omega) },
            a: eta / (eta + 1.0),
            b: 1.0 / (eta + 1.0),
        }
    }

    /// Residuals of both equations at interior rows `0..n-1`.
    fn residuals(&self, p: &[f64], nn: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let p2: Vec<f64> = p.iter().map(|x| x * x).collect();
        let m = self.st.n - 1;
        let mut f1 = Vec::with_capacity(m);
        let mut f2 = Vec::with_capacity(m);
        for i in 0..m {
            let lap = self.st.laplacian(i);
            f1.push(apply(&lap, p) - p[i] + self.a * p[i].powi(3) - self.b * nn[i] * p[i]);
            f2.push(apply(&self.st.wave(i, self.inv_w2), nn) - apply(&lap, &p2));
        }
        (f1, f2)
    }

    /// One Newton correction for the interleaved unknowns `(P_0, N_0, P_1, ...)`.
    fn newton_step(&self, p: &[f64], nn: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.st.n;
        let mut jac = BandMatrix::zeros(2 * n, 7, 7);
        let mut rhs = vec![0.0; 2 * n];
        let (f1, f2) = self.residuals(p, nn);
        for i in 0..n - 1 {
            let lap = self.st.laplacian(i);
            for &(j, w) in &lap {
                jac.add(2 * i, 2 * j, w);
                jac.add(2 * i + 1, 2 * j, -2.0 * w * p[j]);
            }
            jac.add(2 * i, 2 * i, -1.0 + 3.0 * self.a * p[i] * p[i] - self.b * nn[i]);
            jac.add(2 * i, 2 * i + 1, -self.b * p[i]);
            for (j, w) in self.st.wave(i, self.inv_w2) {
                jac.add(2 * i + 1, 2 * j + 1, w);
            }
            rhs[2 * i] = -f1[i];
            rhs[2 * i + 1] = -f2[i];
        }
        let last = n - 1;
        jac.add(2 * last, 2 * last, 1.0);
        jac.add(2 * last + 1, 2 * last + 1, 1.0);
        rhs[2 * last] = -p[last];
        rhs[2 * last + 1] = -nn[last];
        let x = jac.solve(rhs)?;
        Ok((
            x.iter().step_by(2).copied().collect(),
            x.iter().skip(1).step_by(2).copied().collect(),
        ))
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Max-norm defects of the profile equations for given samples of `P` and `N`.
pub fn profile_residuals(p: &RadialProfile, n: &RadialProfile, omega: f64, eta: f64) -> (f64, f64) {
    let d = Discretisation::new(p.len(), p.step(), omega, eta);
    let (f1, f2) = d.residuals(&p.values, &n.values);
    (max_abs(&f1), max_abs(&f2))
}

/// The `ω → ∞` pair `(Q, -Q²)`.
pub fn limit_profile(q: &RadialProfile, eta: f64) -> Result<ProfilePair> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(MzkError::Domain {
            name: "eta",
            value: eta,
            reason: "coupling must be > 0",
        });
    }
    let n = RadialProfile::new(
        q.r.clone(),
        q.values.iter().map(|v| -v * v).collect(),
        q.values.iter().zip(&q.slopes).map(|(v, s)| -2.0 * v * s).collect(),
        2.0 * q.decay_rate,
    )?;
    let residual_norms = profile_residuals(q, &n, f64::INFINITY, eta);
    Ok(ProfilePair {
        p: q.clone(),
        n,
        omega: f64::INFINITY,
        eta,
        residual_norms,
    })
}

/// `(Q, -Q²)` relabelled with a finite `ω`, its residuals evaluated for that `ω`.
pub fn seeded_profile(q: &RadialProfile, omega: f64, eta: f64) -> Result<ProfilePair> {
    check_omega(omega)?;
    let mut pair = limit_profile(q, eta)?;
    pair.omega = omega;
    pair.residual_norms = profile_residuals(&pair.p, &pair.n, omega, eta);
    Ok(pair)
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || omega.is_nan() {
        return Err(MzkError::Domain {
            name: "omega",
            value: omega,
            reason: "must be > 0",
        });
    }
    Ok(())
}

const MAX_NEWTON: usize = 40;

/// Solve the profile system for finite `ω`, starting from `(Q, -Q²)`.
///
/// Each iteration solves the linearised coupled system (banded, decay enforced by
/// `P = N = 0` at `r_max`) and damps the update until the residual decreases.
/// The second equation degenerates at the sonic radius `r = ω`; when that radius
/// lies inside the grid the problem is reported as unresolved.
pub fn solve_profile(omega: f64, eta: f64, q: &RadialProfile, tol: f64) -> Result<ProfilePair> {
    check_omega(omega)?;
    if !(tol > 0.0) {
        return Err(MzkError::Domain {
            name: "tol",
            value: tol,
            reason: "must be > 0",
        });
    }
    let seed = limit_profile(q, eta)?;
    if omega.is_infinite() {
        return Ok(seed);
    }
    if omega <= q.r_max {
        return Err(MzkError::solver(
            "sonic radius r = omega lies inside the radial domain; small-omega profiles are not resolved",
            vec![("omega", omega), ("r_max", q.r_max)],
        ));
    }
    let d = Discretisation::new(q.len(), q.step(), omega, eta);
    let mut p = seed.p.values.clone();
    let mut nn = seed.n.values.clone();
    let norm = |p: &[f64], nn: &[f64]| {
        let (f1, f2) = d.residuals(p, nn);
        max_abs(&f1).max(max_abs(&f2))
    };
    let mut res = norm(&p, &nn);
    let mut iterations = 0;
    while res > tol {
        if iterations == MAX_NEWTON {
            return Err(unconverged(omega, eta, q, p, nn, iterations));
        }
        iterations += 1;
        let (dp, dn) = d.newton_step(&p, &nn)?;
        let mut theta = 1.0;
        loop {
            let tp: Vec<f64> = p.iter().zip(&dp).map(|(a, b)| a + theta * b).collect();
            let tn: Vec<f64> = nn.iter().zip(&dn).map(|(a, b)| a + theta * b).collect();
            let tr = norm(&tp, &tn);
            if tr < res {
                p = tp;
                nn = tn;
                res = tr;
                break;
            }
            theta *= 0.5;
            if theta < 1.0 / 64.0 {
                // Stagnated: no damped step reduces the residual.
                return Err(unconverged(omega, eta, q, p, nn, iterations));
            }
        }
    }
    let p_prof = RadialProfile::from_values(q.r.clone(), p, q.decay_rate)?;
    let n_prof = RadialProfile::from_values(q.r.clone(), nn, 2.0 * q.decay_rate)?;
    let residual_norms = profile_residuals(&p_prof, &n_prof, omega, eta);
    Ok(ProfilePair {
        p: p_prof,
        n: n_prof,
        omega,
        eta,
        residual_norms,
    })
}

fn unconverged(omega: f64, eta: f64, q: &RadialProfile, p: Vec<f64>, nn: Vec<f64>, iterations: usize) -> MzkError {
    let last = RadialProfile::from_values(q.r.clone(), p, q.decay_rate).and_then(|p| {
        let n = RadialProfile::from_values(q.r.clone(), nn, 2.0 * q.decay_rate)?;
        let residual_norms = profile_residuals(&p, &n, omega, eta);
        Ok(ProfilePair {
            p,
            n,
            omega,
            eta,
            residual_norms,
        })
    });
    match last {
        Ok(pair) => MzkError::ProfileUnconverged {
            iterations,
            residual_norms: pair.residual_norms,
            last: Box::new(pair),
        },
        Err(e) => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundstate::reference_q;

    #[test]
    fn limit_pair() {
        let q = reference_q();
        let pair = limit_profile(q, 1.0).unwrap();
        assert!(pair.omega.is_infinite());
        assert!(pair.residual_norms.0 < 1e-8, "{:?}", pair.residual_norms);
        assert!((pair.n.values[0] + q.values[0].powi(2)).abs() < 1e-15);
        assert!((pair.n.decay_rate - 2.0 * q.decay_rate).abs() < 1e-15);
    }

    #[test]
    fn seeded_residual_falls_with_omega() {
        let q = reference_q();
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let omega = 2f64.powi(k);
            let r = seeded_profile(q, omega, 1.0).unwrap().residual_norms;
            assert!(r.1 <= last, "omega = {omega}: {r:?}");
            last = r.1;
        }
    }

    #[test]
    fn large_omega_stays_near_the_limit() {
        let q = reference_q();
        let pair = solve_profile(1e6, 1.0, q, 1e-8).unwrap();
        let limit = limit_profile(q, 1.0).unwrap();
        let dp = pair.p.values.iter().zip(&limit.p.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dn = pair.n.values.iter().zip(&limit.n.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dp < 1e-4 && dn < 1e-4, "{dp} {dn}");
        assert!(pair.residual_norms.0 <= 1e-8 && pair.residual_norms.1 <= 1e-8);
    }

    #[test]
    fn moderate_omega_converges() {
        let q = reference_q();
        let pair = solve_profile(40.0, 1.0, q, 1e-8).unwrap();
        assert!(pair.p.values.iter().all(|&p| p >= -1e-12));
        assert!(pair.residual_norms.0 <= 1e-8 && pair.residual_norms.1 <= 1e-8);
    }

    #[test]
    fn rejects_bad_omega() {
        let q = reference_q();
        assert!(matches!(solve_profile(0.0, 1.0, q, 1e-8), Err(MzkError::Domain { name: "omega", .. })));
        assert!(matches!(solve_profile(-1.0, 1.0, q, 1e-8), Err(MzkError::Domain { .. })));
        assert!(matches!(solve_profile(5.0, 1.0, q, 1e-8), Err(MzkError::SolverFailure { .. })));
    }
}
