//! Test-only oracles, written independently of the library's solvers.
#![allow(dead_code)]

/// Fixed-step RK4 for `Q'' + Q'/r - Q + Q³ = 0`, started from the series
/// `Q(r) ≈ a + a(1 - a²) r²/4`. Returns `+1` if the orbit crosses zero,
/// `-1` if it turns upward while positive, `0` if neither happens before `r_end`.
fn classify_orbit(a: f64, h: f64, r_end: f64) -> i32 {
    let rhs = |r: f64, q: f64, p: f64| (p, -p / r + q - q * q * q);
    let mut r = h;
    let c = a * (1.0 - a * a) / 4.0;
    let (mut q, mut p) = (a + c * h * h, 2.0 * c * h);
    while r < r_end {
        let k1 = rhs(r, q, p);
        let k2 = rhs(r + h / 2.0, q + h / 2.0 * k1.0, p + h / 2.0 * k1.1);
        let k3 = rhs(r + h / 2.0, q + h / 2.0 * k2.0, p + h / 2.0 * k2.1);
        let k4 = rhs(r + h, q + h * k3.0, p + h * k3.1);
        q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += h;
        if q < 0.0 {
            return 1;
        }
        if p > 0.0 {
            return -1;
        }
    }
    0
}

/// `Q(0)` by bisection between undershooting and overshooting orbits.
pub fn oracle_q0() -> f64 {
    let (mut lo, mut hi) = (2.0, 2.5);
    assert_eq!(classify_orbit(lo, 1e-3, 40.0), -1);
    assert_eq!(classify_orbit(hi, 1e-3, 40.0), 1);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match classify_orbit(mid, 1e-3, 40.0) {
            1 => hi = mid,
            -1 => lo = mid,
            _ => break,
        }
    }
    0.5 * (lo + hi)
}

/// `‖Q‖² = 2π ∫ Q² r dr`: RK4 from `oracle_q0` out to `r_cut`, then the
/// `C·K0(r)` tail, approximated by its large-r asymptotics.
pub fn oracle_q_mass(q0: f64) -> f64 {
    let h = 1e-3;
    let r_cut = 9.0;
    let rhs = |r: f64, q: f64, p: f64| (p, -p / r + q - q * q * q);
    let c = q0 * (1.0 - q0 * q0) / 4.0;
    let mut r = h;
    let (mut q, mut p) = (q0 + c * h * h, 2.0 * c * h);
    // ∫₀^h Q² r dr ≈ q0² h²/2
    let mut integral = q0 * q0 * h * h / 2.0;
    let f = |r: f64, q: f64| q * q * r;
    let mut prev = f(r, q);
    // Euler-Maclaurin end correction of the trapezoid rule; f' is negligible at r_cut.
    integral += h * h / 12.0 * (2.0 * q * p * r + q * q);
    while r < r_cut - 1e-12 {
        let k1 = rhs(r, q, p);
        let k2 = rhs(r + h / 2.0, q + h / 2.0 * k1.0, p + h / 2.0 * k1.1);
        let k3 = rhs(r + h / 2.0, q + h / 2.0 * k2.0, p + h / 2.0 * k2.1);
        let k4 = rhs(r + h, q + h * k3.0, p + h * k3.1);
        q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += h;
        let cur = f(r, q);
        integral += 0.5 * h * (prev + cur);
        prev = cur;
    }
    // Q ≈ C e^{-r}/√r beyond r_cut, so Q² r ≈ C² e^{-2r}.
    let tail = q * q * r / 2.0;
    2.0 * std::f64::consts::PI * (integral + tail)
}
