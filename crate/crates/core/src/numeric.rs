//! Adaptive Simpson quadrature and bracketing bisection.

/// Absolute tolerance per quadrature call.
pub const QUAD_TOL: f64 = 1e-12;

/// Absolute time tolerance of the crossing solvers.
pub const TIME_TOL: f64 = 1e-9;

const MAX_DEPTH: u32 = 50;

/// `∫ₐᵇ f` by adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Leftmost point of `[lo, hi]` where the nondecreasing predicate turns true,
/// assuming `pred(lo)` is false and `pred(hi)` is true.
///
/// Returns the midpoint of the final bracket (width ≤ `tol`).
pub fn bisect_leftmost<P: FnMut(f64) -> bool>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn simpson_polynomial_is_exact() {
        let v = adaptive_simpson(&|x: f64| 3.0 * x * x * x - x + 2.0, -1.0, 2.0, QUAD_TOL);
        assert_abs_diff_eq!(v, 0.75 * 16.0 - 0.75 * 1.0 - 1.5 + 6.0, epsilon = 1e-13);
    }

    #[test]
    fn simpson_with_kink() {
        let v = adaptive_simpson(&|x: f64| x.sin().abs(), 0.0, 3.0 * PI, QUAD_TOL);
        assert_abs_diff_eq!(v, 6.0, epsilon = 1e-10);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_leftmost(|x| x * x >= 2.0, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn bisect_plateau_is_leftmost() {
        let r = bisect_leftmost(|x| x >= 1.0, 0.0, 5.0, 1e-12);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
    }
}
