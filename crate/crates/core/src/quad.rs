//! Adaptive Simpson quadrature on a bounded interval.

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("adaptive quadrature exceeded the maximum subdivision depth")]
    DepthExceeded,
}

/// Integrates `f` over `[a, b]` by adaptive Simpson subdivision with
/// Richardson extrapolation, to absolute tolerance `tolerance`.
pub fn adaptive_simpson<T, F>(
    f: F,
    a: T,
    b: T,
    tolerance: T,
    max_depth: u32,
) -> Result<T, QuadError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(T::zero());
    }
    let two = T::c(2.0);
    let m = (a + b) / two;
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    subdivide(&f, a, m, b, fa, fm, fb, whole, tolerance, max_depth)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::c(6.0) * (fa + T::c(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn subdivide<T, F>(
    f: &F,
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tolerance: T,
    depth: u32,
) -> Result<T, QuadError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let two = T::c(2.0);
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::c(15.0) * tolerance {
        return Ok(left + right + delta / T::c(15.0));
    }
    if depth == 0 {
        return Err(QuadError::DepthExceeded);
    }
    let half_tol = tolerance / two;
    let l = subdivide(f, a, lm, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = subdivide(f, m, rm, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let got = adaptive_simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12, 40)
            .unwrap();
        // Antiderivative: x^4/4 - x^2 + x evaluated at 2 minus at 0 = 2.
        assert_abs_diff_eq!(got, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn transcendental_integrand() {
        let got = adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, 1e-10, 50).unwrap();
        assert_abs_diff_eq!(got, std::f64::consts::E - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn endpoint_power_singularity_in_derivative() {
        // x^0.88 has an unbounded derivative at zero, like the value function
        // near the reference.
        let got = adaptive_simpson(|x: f64| x.powf(0.88), 0.0, 1.0, 1e-9, 55).unwrap();
        assert_abs_diff_eq!(got, 1.0 / 1.88, epsilon = 1e-7);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(|x: f64| x, 1.0, 1.0, 1e-9, 10).unwrap(), 0.0);
    }

    #[test]
    fn depth_exhaustion_reports_error() {
        let got = adaptive_simpson(|x: f64| (1e6 * x).sin() / (x + 1e-9), 0.0, 1.0, 1e-14, 4);
        assert_eq!(got, Err(QuadError::DepthExceeded));
    }
}
