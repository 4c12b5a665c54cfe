//! Bounded travel-disutility distributions with exact cdf, quantile, mean,
//! and atomization interfaces.
//!
//! Every kind lives on a compact support `[lower, upper]`. The default
//! constructors pin the shape parameters to the support (normal centered at
//! the midpoint with scale equal to the width, exponential rate equal to the
//! reciprocal width); the `_with` constructors take explicit parameters for
//! sensitivity studies.

use thiserror::Error;

use crate::cpt::{CptError, LotteryAtom, OutcomeLottery};
use crate::math::{std_normal_cdf, std_normal_pdf};
use crate::num::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("support must satisfy lower < upper (got [{lower}, {upper}])")]
    InvalidSupport { lower: f64, upper: f64 },
    #[error("{name} = {value} must be positive and finite")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("max_delays must be at least 1")]
    NoDelays,
    #[error("quantile argument {q} outside [0, 1]")]
    QuantileOutOfRange { q: f64 },
    #[error("value {value} must be finite")]
    NotFinite { value: f64 },
    #[error(transparent)]
    Lottery(#[from] CptError),
}

/// Closed interval `[lower, upper]` of utility values.
///
/// `lower < upper` except for the explicit point constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval<T> {
    lower: T,
    upper: T,
}

impl<T: Real> SupportInterval<T> {
    pub fn new(lower: T, upper: T) -> Result<Self, DistError> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(DistError::InvalidSupport {
                lower: lower.widen(),
                upper: upper.widen(),
            });
        }
        Ok(Self { lower, upper })
    }

    /// Degenerate single-point interval.
    pub fn point(value: T) -> Result<Self, DistError> {
        if !value.is_finite() {
            return Err(DistError::NotFinite {
                value: value.widen(),
            });
        }
        Ok(Self {
            lower: value,
            upper: value,
        })
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// A bounded distribution of the stochastic utility component.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundedDistribution<T> {
    /// Normal density restricted to the support.
    TruncNormal {
        support: SupportInterval<T>,
        location: T,
        scale: T,
        /// Probability mass the untruncated normal puts on the support.
        mass: T,
        /// Standard normal cdf at the lower edge, `Phi((lower-location)/scale)`.
        lower_cdf: T,
    },
    /// Exponential decay away from the upper edge; the mode sits at `upper`.
    TruncExpOptimistic {
        support: SupportInterval<T>,
        rate: T,
        mass: T,
    },
    /// Exponential decay away from the lower edge; the mode sits at `lower`.
    TruncExpPessimistic {
        support: SupportInterval<T>,
        rate: T,
        mass: T,
    },
    /// Poisson-distributed delay count mapped onto `max_delays + 1` equally
    /// spaced atoms, `upper` for zero delays down to `lower` for the maximum.
    TruncPoisson {
        support: SupportInterval<T>,
        rate: T,
        max_delays: usize,
        atoms: OutcomeLottery<T>,
    },
    /// Explicit atom list; the support spans the first to the last atom.
    DiscreteAtoms {
        support: SupportInterval<T>,
        atoms: OutcomeLottery<T>,
    },
    /// Deterministic outcome.
    PointMass { value: T },
}

impl<T: Real> BoundedDistribution<T> {
    /// Truncated normal centered on the support with scale equal to its width.
    pub fn trunc_normal(support: SupportInterval<T>) -> Result<Self, DistError> {
        let location = (support.lower() + support.upper()) / T::c(2.0);
        let scale = support.width();
        Self::trunc_normal_with(support, location, scale)
    }

    pub fn trunc_normal_with(
        support: SupportInterval<T>,
        location: T,
        scale: T,
    ) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "scale",
                value: scale.widen(),
            });
        }
        if !location.is_finite() {
            return Err(DistError::NotFinite {
                value: location.widen(),
            });
        }
        let lower_cdf = std_normal_cdf((support.lower() - location) / scale);
        let upper_cdf = std_normal_cdf((support.upper() - location) / scale);
        let mass = upper_cdf - lower_cdf;
        if !(mass > T::zero()) {
            return Err(DistError::InvalidParameter {
                name: "mass",
                value: mass.widen(),
            });
        }
        Ok(Self::TruncNormal {
            support,
            location,
            scale,
            mass,
            lower_cdf,
        })
    }

    /// Optimistic truncated exponential with rate equal to the reciprocal width.
    pub fn trunc_exp_optimistic(support: SupportInterval<T>) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        let rate = support.width().recip();
        Self::trunc_exp_optimistic_with(support, rate)
    }

    pub fn trunc_exp_optimistic_with(
        support: SupportInterval<T>,
        rate: T,
    ) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        let mass = exp_mass(&support, rate)?;
        Ok(Self::TruncExpOptimistic {
            support,
            rate,
            mass,
        })
    }

    /// Pessimistic truncated exponential with rate equal to the reciprocal width.
    pub fn trunc_exp_pessimistic(support: SupportInterval<T>) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        let rate = support.width().recip();
        Self::trunc_exp_pessimistic_with(support, rate)
    }

    pub fn trunc_exp_pessimistic_with(
        support: SupportInterval<T>,
        rate: T,
    ) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        let mass = exp_mass(&support, rate)?;
        Ok(Self::TruncExpPessimistic {
            support,
            rate,
            mass,
        })
    }

    /// Truncated Poisson delay distribution on `max_delays + 1` atoms.
    pub fn trunc_poisson(
        support: SupportInterval<T>,
        rate: T,
        max_delays: usize,
    ) -> Result<Self, DistError> {
        require_nondegenerate(&support)?;
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "rate",
                value: rate.widen(),
            });
        }
        if max_delays == 0 {
            return Err(DistError::NoDelays);
        }
        let atoms = poisson_atoms(&support, rate, max_delays)?;
        Ok(Self::TruncPoisson {
            support,
            rate,
            max_delays,
            atoms,
        })
    }

    /// Explicit discrete distribution; the support spans the atom range.
    pub fn discrete(atoms: OutcomeLottery<T>) -> Result<Self, DistError> {
        let first = atoms.atoms().first().expect("lottery is never empty");
        let last = atoms.atoms().last().expect("lottery is never empty");
        let support = if atoms.len() == 1 {
            SupportInterval::point(first.utility)?
        } else {
            SupportInterval::new(first.utility, last.utility)?
        };
        Ok(Self::DiscreteAtoms { support, atoms })
    }

    pub fn point_mass(value: T) -> Result<Self, DistError> {
        if !value.is_finite() {
            return Err(DistError::NotFinite {
                value: value.widen(),
            });
        }
        Ok(Self::PointMass { value })
    }

    pub fn support(&self) -> SupportInterval<T> {
        match self {
            Self::TruncNormal { support, .. }
            | Self::TruncExpOptimistic { support, .. }
            | Self::TruncExpPessimistic { support, .. }
            | Self::TruncPoisson { support, .. }
            | Self::DiscreteAtoms { support, .. } => *support,
            Self::PointMass { value } => SupportInterval {
                lower: *value,
                upper: *value,
            },
        }
    }

    /// True for kinds with finitely many atoms.
    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            Self::TruncPoisson { .. } | Self::DiscreteAtoms { .. } | Self::PointMass { .. }
        )
    }

    /// Cumulative distribution function; clamps to 0 below and 1 above the
    /// support, right-continuous steps for the discrete kinds.
    pub fn cdf(&self, x: T) -> T {
        let support = self.support();
        if x < support.lower() {
            return T::zero();
        }
        if x >= support.upper() {
            return T::one();
        }
        match self {
            Self::TruncNormal {
                location,
                scale,
                mass,
                lower_cdf,
                ..
            } => {
                let z = (x - *location) / *scale;
                ((std_normal_cdf(z) - *lower_cdf) / *mass).max(T::zero()).min(T::one())
            }
            Self::TruncExpOptimistic {
                support,
                rate,
                mass,
            } => {
                let tail = (-(*rate) * support.width()).exp();
                let raw = ((-(*rate) * (support.upper() - x)).exp() - tail) / *mass;
                raw.max(T::zero()).min(T::one())
            }
            Self::TruncExpPessimistic {
                support,
                rate,
                mass,
            } => {
                let raw = (T::one() - (-(*rate) * (x - support.lower())).exp()) / *mass;
                raw.max(T::zero()).min(T::one())
            }
            Self::TruncPoisson { atoms, .. } | Self::DiscreteAtoms { atoms, .. } => {
                let mut acc = T::zero();
                for atom in atoms.atoms() {
                    if atom.utility <= x {
                        acc = acc + atom.probability;
                    } else {
                        break;
                    }
                }
                acc.min(T::one())
            }
            Self::PointMass { .. } => T::one(),
        }
    }

    /// Generalized inverse of the cdf. `quantile(0)` is the lower and
    /// `quantile(1)` the upper support bound.
    pub fn quantile(&self, q: T) -> Result<T, DistError> {
        if !(q >= T::zero() && q <= T::one()) {
            return Err(DistError::QuantileOutOfRange { q: q.widen() });
        }
        Ok(self.quantile_clamped(q))
    }

    pub(crate) fn quantile_clamped(&self, q: T) -> T {
        let support = self.support();
        let q = q.max(T::zero()).min(T::one());
        if q == T::zero() {
            return support.lower();
        }
        if q == T::one() {
            return support.upper();
        }
        match self {
            Self::TruncNormal { .. } => bisect_quantile(self, q),
            Self::TruncExpOptimistic {
                support,
                rate,
                mass,
            } => {
                let tail = (-(*rate) * support.width()).exp();
                let x = support.upper() + (q * *mass + tail).ln() / *rate;
                x.max(support.lower()).min(support.upper())
            }
            Self::TruncExpPessimistic {
                support,
                rate,
                mass,
            } => {
                let x = support.lower() - (T::one() - q * *mass).ln() / *rate;
                x.max(support.lower()).min(support.upper())
            }
            Self::TruncPoisson { atoms, .. } | Self::DiscreteAtoms { atoms, .. } => {
                let mut acc = T::zero();
                for atom in atoms.atoms() {
                    acc = acc + atom.probability;
                    if acc >= q {
                        return atom.utility;
                    }
                }
                support.upper()
            }
            Self::PointMass { value } => *value,
        }
    }

    /// Density for the continuous kinds, `None` for atomic ones.
    pub fn density(&self, x: T) -> Option<T> {
        let support = self.support();
        match self {
            Self::TruncNormal {
                location,
                scale,
                mass,
                ..
            } => {
                if !support.contains(x) {
                    return Some(T::zero());
                }
                let z = (x - *location) / *scale;
                Some(std_normal_pdf(z) / (*scale * *mass))
            }
            Self::TruncExpOptimistic {
                support: s,
                rate,
                mass,
            } => {
                if !support.contains(x) {
                    return Some(T::zero());
                }
                Some(*rate * (-(*rate) * (s.upper() - x)).exp() / *mass)
            }
            Self::TruncExpPessimistic {
                support: s,
                rate,
                mass,
            } => {
                if !support.contains(x) {
                    return Some(T::zero());
                }
                Some(*rate * (-(*rate) * (x - s.lower())).exp() / *mass)
            }
            _ => None,
        }
    }

    /// Expected value, by closed form.
    pub fn mean(&self) -> T {
        match self {
            Self::TruncNormal {
                support,
                location,
                scale,
                mass,
                ..
            } => {
                let a = (support.lower() - *location) / *scale;
                let b = (support.upper() - *location) / *scale;
                *location + *scale * (std_normal_pdf(a) - std_normal_pdf(b)) / *mass
            }
            Self::TruncExpOptimistic {
                support,
                rate,
                mass,
            } => {
                let w = support.width();
                let tail = (-(*rate) * w).exp();
                support.upper() - ((T::one() - tail) / *rate - w * tail) / *mass
            }
            Self::TruncExpPessimistic {
                support,
                rate,
                mass,
            } => {
                let w = support.width();
                let tail = (-(*rate) * w).exp();
                support.lower() + ((T::one() - tail) / *rate - w * tail) / *mass
            }
            Self::TruncPoisson { atoms, .. } | Self::DiscreteAtoms { atoms, .. } => atoms.mean(),
            Self::PointMass { value } => *value,
        }
    }

    /// Discretizes into an equal-probability quantile-midpoint lottery with
    /// `n` atoms. Kinds with native atoms return them unchanged, ignoring `n`.
    pub fn atomize(&self, n: usize) -> Result<OutcomeLottery<T>, CptError> {
        match self {
            Self::TruncPoisson { atoms, .. } | Self::DiscreteAtoms { atoms, .. } => {
                Ok(atoms.clone())
            }
            Self::PointMass { value } => OutcomeLottery::new(vec![LotteryAtom {
                utility: *value,
                probability: T::one(),
            }]),
            _ => {
                let n = n.max(1);
                let probability = T::of_usize(n).recip();
                let atoms = self
                    .quantile_midpoints(n)
                    .into_iter()
                    .map(|utility| LotteryAtom {
                        utility,
                        probability,
                    })
                    .collect();
                OutcomeLottery::new(atoms)
            }
        }
    }

    /// Quantiles at the midpoints of `n` equal probability cells.
    pub(crate) fn quantile_midpoints(&self, n: usize) -> Vec<T> {
        let scale = T::of_usize(n);
        let half = T::c(0.5);
        (0..n)
            .map(|i| self.quantile_clamped((T::of_usize(i) + half) / scale))
            .collect()
    }

    /// Atom values and probabilities of the discrete kinds.
    pub(crate) fn native_atoms(&self) -> (Vec<T>, Vec<T>) {
        match self {
            Self::TruncPoisson { atoms, .. } | Self::DiscreteAtoms { atoms, .. } => {
                (atoms.utilities(), atoms.probabilities())
            }
            Self::PointMass { value } => (vec![*value], vec![T::one()]),
            _ => unreachable!("native_atoms called on a continuous distribution"),
        }
    }
}

fn require_nondegenerate<T: Real>(support: &SupportInterval<T>) -> Result<(), DistError> {
    if support.is_degenerate() {
        return Err(DistError::InvalidSupport {
            lower: support.lower().widen(),
            upper: support.upper().widen(),
        });
    }
    Ok(())
}

fn exp_mass<T: Real>(support: &SupportInterval<T>, rate: T) -> Result<T, DistError> {
    if !(rate > T::zero()) || !rate.is_finite() {
        return Err(DistError::InvalidParameter {
            name: "rate",
            value: rate.widen(),
        });
    }
    Ok(T::one() - (-rate * support.width()).exp())
}

/// Poisson atom lottery: `k` delays land at `upper - k * width / max_delays`,
/// weighted by `rate^k / k!`. Log-space weights keep `max_delays` up to a few
/// hundred overflow-free.
fn poisson_atoms<T: Real>(
    support: &SupportInterval<T>,
    rate: T,
    max_delays: usize,
) -> Result<OutcomeLottery<T>, DistError> {
    let step = support.width() / T::of_usize(max_delays);
    let log_rate = rate.ln();
    let mut log_weights = Vec::with_capacity(max_delays + 1);
    let mut log_factorial = T::zero();
    for k in 0..=max_delays {
        if k > 0 {
            log_factorial = log_factorial + T::of_usize(k).ln();
        }
        log_weights.push(T::of_usize(k) * log_rate - log_factorial);
    }
    let peak = log_weights
        .iter()
        .fold(T::neg_infinity(), |acc, &w| acc.max(w));
    let weights: Vec<T> = log_weights.iter().map(|&w| (w - peak).exp()).collect();
    let total: T = weights.iter().copied().sum();

    // Atoms in increasing utility: the worst case (all delays) first.
    let mut atoms = Vec::with_capacity(max_delays + 1);
    for k in (0..=max_delays).rev() {
        let utility = if k == max_delays {
            support.lower()
        } else {
            support.upper() - T::of_usize(k) * step
        };
        atoms.push(LotteryAtom {
            utility,
            probability: weights[k] / total,
        });
    }
    Ok(OutcomeLottery::new(atoms)?)
}

fn bisect_quantile<T: Real>(dist: &BoundedDistribution<T>, q: T) -> T {
    let support = dist.support();
    let mut lo = support.lower();
    let mut hi = support.upper();
    for _ in 0..200 {
        let mid = (lo + hi) / T::c(2.0);
        if !(mid > lo && mid < hi) {
            break;
        }
        if dist.cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        let span = hi - lo;
        let floor = T::epsilon() * (T::one().max(lo.abs()).max(hi.abs())) * T::c(4.0);
        if span <= floor {
            break;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive_simpson;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn paper_support() -> SupportInterval<f64> {
        SupportInterval::new(-3.47, -3.07).unwrap()
    }

    fn all_continuous() -> Vec<BoundedDistribution<f64>> {
        let s = paper_support();
        vec![
            BoundedDistribution::trunc_normal(s).unwrap(),
            BoundedDistribution::trunc_exp_optimistic(s).unwrap(),
            BoundedDistribution::trunc_exp_pessimistic(s).unwrap(),
        ]
    }

    #[test]
    fn support_validation() {
        assert!(SupportInterval::new(1.0, 0.0).is_err());
        assert!(SupportInterval::new(1.0, 1.0).is_err());
        assert!(SupportInterval::new(f64::NAN, 2.0).is_err());
        let p = SupportInterval::point(1.5).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.width(), 0.0);
    }

    #[test]
    fn default_constructors_pin_shape_to_support() {
        let s = paper_support();
        match BoundedDistribution::trunc_normal(s).unwrap() {
            BoundedDistribution::TruncNormal {
                location, scale, ..
            } => {
                assert_relative_eq!(location, -3.27, epsilon = 1e-12);
                assert_relative_eq!(scale, 0.4, epsilon = 1e-12);
            }
            _ => unreachable!(),
        }
        match BoundedDistribution::trunc_exp_optimistic(s).unwrap() {
            BoundedDistribution::TruncExpOptimistic { rate, .. } => {
                assert_relative_eq!(rate, 1.0 / 0.4, epsilon = 1e-12);
            }
            _ => unreachable!(),
        }
        match BoundedDistribution::trunc_exp_pessimistic(s).unwrap() {
            BoundedDistribution::TruncExpPessimistic { rate, .. } => {
                assert_relative_eq!(rate, 1.0 / 0.4, epsilon = 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let s = paper_support();
        assert!(BoundedDistribution::trunc_normal_with(s, -3.27, 0.0).is_err());
        assert!(BoundedDistribution::trunc_exp_optimistic_with(s, -1.0).is_err());
        assert!(BoundedDistribution::trunc_poisson(s, 0.0, 1).is_err());
        assert!(BoundedDistribution::trunc_poisson(s, 4.0, 0).is_err());
        assert!(BoundedDistribution::point_mass(f64::INFINITY).is_err());
        let degenerate = SupportInterval::point(-3.0).unwrap();
        assert!(BoundedDistribution::trunc_normal(degenerate).is_err());
    }

    #[test]
    fn cdf_respects_support_bounds() {
        let s = paper_support();
        let mut dists = all_continuous();
        dists.push(BoundedDistribution::trunc_poisson(s, 4.0, 5).unwrap());
        for dist in &dists {
            assert_eq!(dist.cdf(s.lower() - 1.0), 0.0);
            assert_eq!(dist.cdf(s.upper()), 1.0);
            assert_eq!(dist.cdf(s.upper() + 0.5), 1.0);
        }
    }

    #[test]
    fn cdf_is_nondecreasing() {
        for dist in all_continuous() {
            let s = dist.support();
            let mut previous = -1.0;
            for i in 0..=500 {
                let x = s.lower() + s.width() * i as f64 / 500.0;
                let c = dist.cdf(x);
                assert!(c >= previous);
                previous = c;
            }
        }
    }

    #[test]
    fn optimistic_kind_keeps_mass_near_the_best_case() {
        let s = paper_support();
        let dist = BoundedDistribution::trunc_exp_optimistic(s).unwrap();
        let midpoint = (s.lower() + s.upper()) / 2.0;
        assert!(dist.cdf(midpoint) < 0.5);

        // Oracle: integrate the density up to the midpoint.
        let numeric = adaptive_simpson(
            |x| dist.density(x).unwrap(),
            s.lower(),
            midpoint,
            1e-10,
            50,
        )
        .unwrap();
        assert_abs_diff_eq!(dist.cdf(midpoint), numeric, epsilon = 1e-8);
    }

    #[test]
    fn single_delay_poisson_puts_rate_fraction_on_the_worst_case() {
        let s = paper_support();
        for rate in [0.05, 1.0, 4.0, 19.0] {
            let dist = BoundedDistribution::trunc_poisson(s, rate, 1).unwrap();
            assert_relative_eq!(dist.cdf(s.lower()), rate / (rate + 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn quantile_hits_support_ends_exactly() {
        let s = paper_support();
        let mut dists = all_continuous();
        dists.push(BoundedDistribution::trunc_poisson(s, 4.0, 5).unwrap());
        for dist in &dists {
            assert_eq!(dist.quantile(0.0).unwrap(), s.lower());
            assert_eq!(dist.quantile(1.0).unwrap(), s.upper());
        }
        assert!(dists[0].quantile(-0.1).is_err());
        assert!(dists[0].quantile(1.1).is_err());
    }

    #[test]
    fn centered_normal_median_is_the_location() {
        let dist = BoundedDistribution::trunc_normal(paper_support()).unwrap();
        assert_abs_diff_eq!(dist.quantile(0.5).unwrap(), -3.27, epsilon = 1e-9);
    }

    #[test]
    fn pessimistic_median_sits_below_the_midpoint() {
        let s = paper_support();
        let dist = BoundedDistribution::trunc_exp_pessimistic(s).unwrap();
        let median = dist.quantile(0.5).unwrap();
        assert!(median < (s.lower() + s.upper()) / 2.0);

        // Oracle: bisection on the cdf.
        let mut lo = s.lower();
        let mut hi = s.upper();
        for _ in 0..80 {
            let mid = (lo + hi) / 2.0;
            if dist.cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(median, hi, epsilon = 1e-9);
    }

    #[test]
    fn cdf_quantile_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dist in all_continuous() {
            let s = dist.support();
            for _ in 0..1000 {
                let x = s.lower() + rng.gen::<f64>() * s.width();
                let back = dist.quantile(dist.cdf(x)).unwrap();
                assert_abs_diff_eq!(back, x, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn density_normalizes_to_one() {
        for dist in all_continuous() {
            let s = dist.support();
            let integral = adaptive_simpson(
                |x| dist.density(x).unwrap(),
                s.lower(),
                s.upper(),
                1e-10,
                50,
            )
            .unwrap();
            assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn means_match_oracles() {
        let s = paper_support();
        assert_eq!(
            BoundedDistribution::point_mass(-3.2).unwrap().mean(),
            -3.2
        );
        let normal = BoundedDistribution::trunc_normal(s).unwrap();
        assert_relative_eq!(normal.mean(), -3.27, epsilon = 1e-12);

        // Continuous kinds: closed form against numeric first moment.
        for dist in all_continuous() {
            let numeric = adaptive_simpson(
                |x| x * dist.density(x).unwrap(),
                s.lower(),
                s.upper(),
                1e-11,
                50,
            )
            .unwrap();
            assert_abs_diff_eq!(dist.mean(), numeric, epsilon = 1e-8);
        }

        // Poisson: brute-force sum over the six atoms with exact factorials.
        let rate: f64 = 4.0;
        let max_delays = 5;
        let dist = BoundedDistribution::trunc_poisson(s, rate, max_delays).unwrap();
        let mut total_weight = 0.0;
        let mut weighted = 0.0;
        for k in 0..=max_delays {
            let factorial: f64 = (1..=k).map(|j| j as f64).product();
            let weight = rate.powi(k as i32) * (-rate).exp() / factorial;
            let x = s.upper() - k as f64 * s.width() / max_delays as f64;
            total_weight += weight;
            weighted += weight * x;
        }
        assert_relative_eq!(dist.mean(), weighted / total_weight, epsilon = 1e-12);
    }

    #[test]
    fn poisson_probabilities_match_direct_factorial_evaluation() {
        let s = paper_support();
        for max_delays in [1usize, 3, 7, 20] {
            for rate in [0.3, 2.0, 9.5] {
                let dist = BoundedDistribution::trunc_poisson(s, rate, max_delays).unwrap();
                let atoms = match &dist {
                    BoundedDistribution::TruncPoisson { atoms, .. } => atoms,
                    _ => unreachable!(),
                };
                let direct: Vec<f64> = (0..=max_delays)
                    .map(|k| {
                        let factorial: f64 = (1..=k).map(|j| j as f64).product();
                        rate.powi(k as i32) * (-rate).exp() / factorial
                    })
                    .collect();
                let z: f64 = direct.iter().sum();
                for (i, atom) in atoms.atoms().iter().enumerate() {
                    let k = max_delays - i;
                    assert_relative_eq!(atom.probability, direct[k] / z, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn poisson_log_space_survives_large_delay_counts() {
        let s = SupportInterval::new(0.0, 1.0).unwrap();
        let dist = BoundedDistribution::trunc_poisson(s, 80.0, 170).unwrap();
        let atoms = match &dist {
            BoundedDistribution::TruncPoisson { atoms, .. } => atoms,
            _ => unreachable!(),
        };
        let total: f64 = atoms.atoms().iter().map(|a| a.probability).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-9);
        assert!(atoms.atoms().iter().all(|a| a.probability.is_finite()));
    }

    #[test]
    fn atomize_point_mass_and_two_atom_cases() {
        let pm = BoundedDistribution::point_mass(-3.2).unwrap();
        let lottery = pm.atomize(64).unwrap();
        assert_eq!(lottery.len(), 1);
        assert_eq!(lottery.atoms()[0].utility, -3.2);
        assert_eq!(lottery.atoms()[0].probability, 1.0);

        let normal = BoundedDistribution::trunc_normal(paper_support()).unwrap();
        let two = normal.atomize(2).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.atoms()[0].probability, 0.5);
        assert_abs_diff_eq!(
            two.atoms()[0].utility,
            normal.quantile(0.25).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            two.atoms()[1].utility,
            normal.quantile(0.75).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_delay_poisson_atomizes_to_the_two_tail_atoms() {
        let s = paper_support();
        let rate = 19.0;
        let dist = BoundedDistribution::trunc_poisson(s, rate, 1).unwrap();
        let lottery = dist.atomize(4096).unwrap();
        assert_eq!(lottery.len(), 2);
        assert_eq!(lottery.atoms()[0].utility, s.lower());
        assert_eq!(lottery.atoms()[1].utility, s.upper());
        assert_relative_eq!(
            lottery.atoms()[0].probability,
            rate / (rate + 1.0),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            lottery.atoms()[1].probability,
            1.0 / (rate + 1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn atomized_means_converge_to_the_exact_mean() {
        for dist in all_continuous() {
            let exact = dist.mean();
            let mut previous_error = f64::INFINITY;
            let mut n = 64;
            while n <= 4096 {
                let err = (dist.atomize(n).unwrap().mean() - exact).abs();
                assert!(
                    err <= previous_error + 1e-12,
                    "error grew from {previous_error} to {err} at n = {n}"
                );
                previous_error = err;
                n *= 2;
            }
            assert!(previous_error < 1e-7);
        }
    }

    #[test]
    fn discrete_atoms_support_spans_the_atom_range() {
        let lottery =
            OutcomeLottery::from_pairs(vec![(-3.4, 0.25), (-3.3, 0.5), (-3.1, 0.25)]).unwrap();
        let dist = BoundedDistribution::discrete(lottery).unwrap();
        let s = dist.support();
        assert_eq!(s.lower(), -3.4);
        assert_eq!(s.upper(), -3.1);
        assert_eq!(dist.quantile(0.3).unwrap(), -3.3);
        assert_eq!(dist.quantile(0.9).unwrap(), -3.1);
    }

    #[test]
    fn works_in_single_precision() {
        let s = SupportInterval::<f32>::new(-3.47, -3.07).unwrap();
        let dist = BoundedDistribution::trunc_normal(s).unwrap();
        let m = dist.mean();
        assert!((m + 3.27).abs() < 1e-5);
        assert!(dist.cdf(-3.27) > 0.45 && dist.cdf(-3.27) < 0.55);
    }
}
