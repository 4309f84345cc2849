//! Adaptive scalar quadrature.
//!
//! Purpose: one dependable integrator for every one-dimensional cost integral
//! in the crate — weighted tube periods, crossing costs, curve-length
//! functionals. These integrands are smooth except at isolated points where a
//! √-type kink sits at a known location (a crossing centre), and callers are
//! expected to split the interval there; what remains is smooth with at worst
//! unbounded higher derivatives at an endpoint.
//!
//! Why adaptive Simpson: with the kink split off, Richardson-corrected
//! Simpson refinement converges fast and gives a cheap per-interval error
//! estimate. We deliberately avoid fancier Gauss–Kronrod machinery; the
//! integrands are one-dimensional, cheap, and called during setup, not in hot
//! loops.

/// Hard recursion cap. At depth 52 the subinterval width has shrunk by 2⁻⁵²,
/// i.e. to the last ulp of the endpoints; further splitting cannot help.
const MAX_DEPTH: u32 = 52;

/// ∫_a^b f, adaptive Simpson with Richardson correction.
///
/// `tol` is an absolute tolerance on the whole interval; subintervals get a
/// proportional share. Returns the best estimate even if the depth cap is
/// hit (the cap only matters for integrable endpoint singularities, where
/// the remaining error is far below any tolerance used in this crate).
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    f: &impl Fn(f64) -> f64,
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
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // 15 = 2⁴ − 1: Simpson is order 4, so the two-panel estimate cancels the
    // leading error term of the one-panel estimate up to this factor.
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // Simpson is exact on cubics; the adaptive wrapper must not spoil it.
        let got = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12);
        let want = (16.0 - 1.0) / 4.0 - (4.0 - 1.0) + 3.0; // antiderivative x⁴/4 − x² + x
        assert!((got - want).abs() < 1e-13, "got {got}, want {want}");
    }

    #[test]
    fn integrates_sine_over_half_period() {
        let got = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((got - 2.0).abs() < 1e-11, "got {got}");
    }

    #[test]
    fn handles_sqrt_endpoint_derivative_blowup() {
        // √t has unbounded derivatives at 0 but is integrable; the adaptive
        // split must still reach 1e-10 — this is the shape of a crossing-cost
        // integrand after the caller splits at the kink.
        let got = adaptive_simpson(f64::sqrt, 0.0, 1.0, 1e-12);
        assert!((got - 2.0 / 3.0).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn tolerance_scales_subdivision() {
        // A highly oscillatory integrand: loose tolerance must still land
        // within its own budget.
        let f = |x: f64| (20.0 * x).sin() * (3.0 * x).cos();
        let tight = adaptive_simpson(f, 0.0, 3.0, 1e-13);
        let loose = adaptive_simpson(f, 0.0, 3.0, 1e-6);
        assert!((tight - loose).abs() < 1e-5);
    }
}
