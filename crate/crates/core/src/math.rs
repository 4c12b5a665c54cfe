//! Special functions shared by the distribution kinds.

use crate::num::Real;

/// Error function, evaluated in double precision.
pub(crate) fn erf<T: Real>(x: T) -> T {
    T::c(libm::erf(x.widen()))
}

/// Standard normal cumulative distribution function.
pub(crate) fn std_normal_cdf<T: Real>(z: T) -> T {
    let half = T::c(0.5);
    half * (T::one() + erf(z / T::c(std::f64::consts::SQRT_2)))
}

/// Standard normal density.
pub(crate) fn std_normal_pdf<T: Real>(z: T) -> T {
    let inv_sqrt_2pi = T::c(1.0 / (2.0 * std::f64::consts::PI).sqrt());
    inv_sqrt_2pi * (-z * z / T::c(2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_cdf_reference_values() {
        assert_relative_eq!(std_normal_cdf(0.0f64), 0.5, epsilon = 1e-15);
        assert_relative_eq!(std_normal_cdf(1.0f64), 0.8413447460685429, epsilon = 1e-12);
        assert_relative_eq!(std_normal_cdf(-1.0f64), 0.15865525393145707, epsilon = 1e-12);
    }

    #[test]
    fn normal_pdf_peak() {
        assert_relative_eq!(std_normal_pdf(0.0f64), 0.3989422804014327, epsilon = 1e-14);
    }
}
