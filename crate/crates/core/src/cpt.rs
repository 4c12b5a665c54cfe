//! Rank-dependent subjective valuation of uncertain prospects.
//!
//! Outcomes are valued relative to a reference point by a two-branch power
//! value function, and probabilities are distorted by the Prelec weighting
//! curve applied to cumulative (loss side) and decumulative (gain side)
//! probabilities. Weighting the cumulative rather than the raw probabilities
//! keeps the valuation consistent with first-order stochastic dominance.

use thiserror::Error;

use crate::dist::BoundedDistribution;
use crate::num::Real;
use crate::quad::{adaptive_simpson, QuadError};

/// Errors from prospect valuation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CptError {
    #[error("parameter {name} = {value} outside its valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("lottery must have at least one atom")]
    EmptyLottery,
    #[error("lottery utilities must be strictly increasing and finite (atom {index})")]
    UnorderedAtoms { index: usize },
    #[error("atom {index} probability {value} outside (0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("atom probabilities sum to {sum}, expected 1")]
    ProbabilityMassMismatch { sum: f64 },
    #[error("probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },
    #[error("refinement stalled: |delta| = {delta} > {tolerance} at {atoms} atoms")]
    NonConvergence {
        delta: f64,
        tolerance: f64,
        atoms: usize,
    },
    #[error("quadrature did not reach the requested tolerance")]
    QuadratureNonConvergence,
    #[error("quadrature requires a continuous distribution")]
    QuadratureRequiresContinuous,
}

impl From<QuadError> for CptError {
    fn from(_: QuadError) -> Self {
        CptError::QuadratureNonConvergence
    }
}

/// Behavioral parameters of the value function and probability weighting.
///
/// `alpha` is the probability-distortion exponent, `beta_plus`/`beta_minus`
/// the gain/loss curvature exponents, and `lambda` the loss-aversion
/// coefficient. All exponents live in `(0, 1]`; `lambda >= 1`, with the
/// all-ones corner reproducing risk-neutral expected utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptParams<T> {
    pub alpha: T,
    pub beta_plus: T,
    pub beta_minus: T,
    pub lambda: T,
}

impl<T: Real> CptParams<T> {
    pub fn new(alpha: T, beta_plus: T, beta_minus: T, lambda: T) -> Result<Self, CptError> {
        let params = Self {
            alpha,
            beta_plus,
            beta_minus,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    /// Like [`CptParams::new`] but accepts `0 < lambda < 1`.
    ///
    /// Loss-aversion coefficients below one are outside the standard model
    /// and only useful for sensitivity and diagnostic runs.
    pub fn new_relaxed(alpha: T, beta_plus: T, beta_minus: T, lambda: T) -> Result<Self, CptError> {
        let params = Self {
            alpha,
            beta_plus,
            beta_minus,
            lambda,
        };
        params.validate_relaxed()?;
        Ok(params)
    }

    /// Parameters of a rational (expected-utility) decision maker.
    pub fn rational() -> Self {
        Self {
            alpha: T::one(),
            beta_plus: T::one(),
            beta_minus: T::one(),
            lambda: T::one(),
        }
    }

    /// Keeps the probability distortion but removes value curvature and
    /// loss aversion (`beta_plus = beta_minus = lambda = 1`).
    pub fn weighting_only(&self) -> Self {
        Self {
            alpha: self.alpha,
            beta_plus: T::one(),
            beta_minus: T::one(),
            lambda: T::one(),
        }
    }

    pub fn validate(&self) -> Result<(), CptError> {
        self.validate_relaxed()?;
        if self.lambda < T::one() {
            return Err(CptError::InvalidParameter {
                name: "lambda",
                value: self.lambda.widen(),
                range: "[1, inf)",
            });
        }
        Ok(())
    }

    pub fn validate_relaxed(&self) -> Result<(), CptError> {
        check_unit_exponent("alpha", self.alpha)?;
        check_unit_exponent("beta_plus", self.beta_plus)?;
        check_unit_exponent("beta_minus", self.beta_minus)?;
        if !(self.lambda > T::zero()) || !self.lambda.is_finite() {
            return Err(CptError::InvalidParameter {
                name: "lambda",
                value: self.lambda.widen(),
                range: "(0, inf)",
            });
        }
        Ok(())
    }
}

fn check_unit_exponent<T: Real>(name: &'static str, value: T) -> Result<(), CptError> {
    if !(value > T::zero() && value <= T::one()) {
        return Err(CptError::InvalidParameter {
            name,
            value: value.widen(),
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// One outcome of a discrete prospect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotteryAtom<T> {
    pub utility: T,
    pub probability: T,
}

/// A discrete prospect: outcomes in strictly increasing utility order with
/// probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeLottery<T> {
    atoms: Vec<LotteryAtom<T>>,
}

impl<T: Real> OutcomeLottery<T> {
    pub fn new(atoms: Vec<LotteryAtom<T>>) -> Result<Self, CptError> {
        if atoms.is_empty() {
            return Err(CptError::EmptyLottery);
        }
        let mut mass = T::zero();
        for (index, atom) in atoms.iter().enumerate() {
            if !atom.utility.is_finite() {
                return Err(CptError::UnorderedAtoms { index });
            }
            if index > 0 && atoms[index - 1].utility >= atom.utility {
                return Err(CptError::UnorderedAtoms { index });
            }
            if !(atom.probability > T::zero() && atom.probability <= T::one()) {
                return Err(CptError::InvalidProbability {
                    index,
                    value: atom.probability.widen(),
                });
            }
            mass = mass + atom.probability;
        }
        let tol = mass_tolerance::<T>(atoms.len());
        if (mass - T::one()).abs() > tol {
            return Err(CptError::ProbabilityMassMismatch { sum: mass.widen() });
        }
        Ok(Self { atoms })
    }

    pub fn from_pairs(pairs: Vec<(T, T)>) -> Result<Self, CptError> {
        Self::new(
            pairs
                .into_iter()
                .map(|(utility, probability)| LotteryAtom {
                    utility,
                    probability,
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[LotteryAtom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Expected utility of the lottery.
    pub fn mean(&self) -> T {
        self.atoms
            .iter()
            .map(|a| a.utility * a.probability)
            .sum()
    }

    /// The same lottery with every utility shifted by `delta`.
    pub fn shifted(&self, delta: T) -> Result<Self, CptError> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| LotteryAtom {
                    utility: a.utility + delta,
                    probability: a.probability,
                })
                .collect(),
        )
    }

    pub(crate) fn utilities(&self) -> Vec<T> {
        self.atoms.iter().map(|a| a.utility).collect()
    }

    pub(crate) fn probabilities(&self) -> Vec<T> {
        self.atoms.iter().map(|a| a.probability).collect()
    }
}

fn mass_tolerance<T: Real>(n: usize) -> T {
    T::c(1e-12).max(T::epsilon() * T::of_usize(8 * n))
}

/// Two-branch power value function around the reference point `r`:
/// `(u - r)^beta_plus` for non-losses, `-lambda (r - u)^beta_minus` for losses.
pub fn value<T: Real>(u: T, r: T, params: &CptParams<T>) -> T {
    if u >= r {
        (u - r).powf(params.beta_plus)
    } else {
        -params.lambda * (r - u).powf(params.beta_minus)
    }
}

/// Prelec probability weighting `exp(-(-ln p)^alpha)`.
///
/// Fixes 0, 1 and `1/e` for every `alpha`; `alpha < 1` overweights small and
/// underweights large probabilities. Inputs within `1e-12` of `[0, 1]` are
/// clamped, anything further out is a domain error.
pub fn prelec_weight<T: Real>(p: T, alpha: T) -> Result<T, CptError> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(CptError::InvalidParameter {
            name: "alpha",
            value: alpha.widen(),
            range: "(0, inf)",
        });
    }
    let slack = T::c(1e-12);
    if !p.is_finite() || p < -slack || p > T::one() + slack {
        return Err(CptError::ProbabilityOutOfRange { value: p.widen() });
    }
    Ok(prelec_unchecked(clamp01(p), alpha))
}

/// Inverse of the Prelec curve: the `p` with `prelec_weight(p, alpha) = w`.
pub fn prelec_weight_inverse<T: Real>(w: T, alpha: T) -> Result<T, CptError> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(CptError::InvalidParameter {
            name: "alpha",
            value: alpha.widen(),
            range: "(0, inf)",
        });
    }
    let slack = T::c(1e-12);
    if !w.is_finite() || w < -slack || w > T::one() + slack {
        return Err(CptError::ProbabilityOutOfRange { value: w.widen() });
    }
    Ok(prelec_unchecked(clamp01(w), alpha.recip()))
}

/// Prelec curve on an already-clamped probability.
pub(crate) fn prelec_unchecked<T: Real>(p: T, alpha: T) -> T {
    if alpha == T::one() {
        // The curve is the identity; skip the exp/ln round trip.
        return p;
    }
    if p == T::zero() {
        return T::zero();
    }
    if p == T::one() {
        return T::one();
    }
    (-(-p.ln()).powf(alpha)).exp()
}

pub(crate) fn clamp01<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

/// Decision weights aligned with the atoms of an [`OutcomeLottery`];
/// `loss_count` atoms at the front sit strictly below the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionWeights<T> {
    pub weights: Vec<T>,
    pub loss_count: usize,
}

/// Prelec-transformed cumulative and decumulative probability tables for a
/// fixed atom ordering. Building the tables once lets a tariff sweep reuse
/// them for every reference split.
#[derive(Debug, Clone)]
pub struct PreparedWeights<T> {
    /// `cum_pi[i]` = distorted probability mass of the first `i` atoms.
    cum_pi: Vec<T>,
    /// `dec_pi[i]` = distorted probability mass of atoms `i..n`.
    dec_pi: Vec<T>,
    probabilities: Vec<T>,
    identity: bool,
}

impl<T: Real> PreparedWeights<T> {
    pub fn from_probabilities(probabilities: &[T], alpha: T) -> Self {
        let n = probabilities.len();
        let identity = alpha == T::one();
        let mut cum_pi = Vec::with_capacity(n + 1);
        let mut dec_pi = vec![T::zero(); n + 1];
        if !identity {
            cum_pi.push(T::zero());
            let mut acc = T::zero();
            for &p in probabilities.iter() {
                acc = acc + p;
                cum_pi.push(prelec_unchecked(clamp01(acc), alpha));
            }
            cum_pi[n] = T::one();
            let mut acc = T::zero();
            for i in (0..n).rev() {
                acc = acc + probabilities[i];
                dec_pi[i] = prelec_unchecked(clamp01(acc), alpha);
            }
            dec_pi[0] = T::one();
        }
        Self {
            cum_pi,
            dec_pi,
            probabilities: probabilities.to_vec(),
            identity,
        }
    }

    /// Tables for `n` equally likely atoms, with exact cell boundaries `i/n`.
    pub fn uniform(n: usize, alpha: T) -> Self {
        let identity = alpha == T::one();
        let scale = T::of_usize(n);
        let mut cum_pi = Vec::with_capacity(n + 1);
        let mut dec_pi = Vec::with_capacity(n + 1);
        if !identity {
            for i in 0..=n {
                cum_pi.push(prelec_unchecked(T::of_usize(i) / scale, alpha));
                dec_pi.push(prelec_unchecked(T::of_usize(n - i) / scale, alpha));
            }
        }
        Self {
            cum_pi,
            dec_pi,
            probabilities: vec![scale.recip(); n],
            identity,
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    /// Weight of atom `i` when it is a loss.
    #[inline]
    pub fn loss_weight(&self, i: usize) -> T {
        if self.identity {
            self.probabilities[i]
        } else {
            (self.cum_pi[i + 1] - self.cum_pi[i]).max(T::zero())
        }
    }

    /// Weight of atom `i` when it is a non-loss.
    #[inline]
    pub fn gain_weight(&self, i: usize) -> T {
        if self.identity {
            self.probabilities[i]
        } else {
            (self.dec_pi[i] - self.dec_pi[i + 1]).max(T::zero())
        }
    }

    pub fn decision_weights(&self, loss_count: usize) -> DecisionWeights<T> {
        let n = self.len();
        let mut weights = Vec::with_capacity(n);
        for i in 0..loss_count {
            weights.push(self.loss_weight(i));
        }
        for i in loss_count..n {
            weights.push(self.gain_weight(i));
        }
        DecisionWeights {
            weights,
            loss_count,
        }
    }
}

/// Number of atoms whose shifted utility falls strictly below the reference.
pub(crate) fn loss_split<T: Real>(utilities: &[T], shift: T, reference: T) -> usize {
    utilities.partition_point(|&x| x + shift < reference)
}

/// Subjective utility of prepared atoms shifted by `shift`, valued against
/// `reference`. Losses take cumulative weights, non-losses decumulative ones.
pub(crate) fn eval_prepared<T: Real>(
    utilities: &[T],
    shift: T,
    prepared: &PreparedWeights<T>,
    reference: T,
    params: &CptParams<T>,
) -> T {
    debug_assert_eq!(utilities.len(), prepared.len());
    let split = loss_split(utilities, shift, reference);
    let mut loss = T::zero();
    for (i, &u) in utilities.iter().enumerate().take(split) {
        let magnitude = reference - (u + shift);
        loss = loss + prepared.loss_weight(i) * magnitude.powf(params.beta_minus);
    }
    let mut gain = T::zero();
    for (i, &u) in utilities.iter().enumerate().skip(split) {
        let magnitude = (u + shift) - reference;
        gain = gain + prepared.gain_weight(i) * magnitude.powf(params.beta_plus);
    }
    gain - params.lambda * loss
}

/// Decision weights of a lottery against reference `r`.
///
/// With `alpha = 1` the weights equal the raw probabilities exactly.
pub fn decision_weights<T: Real>(
    lottery: &OutcomeLottery<T>,
    r: T,
    params: &CptParams<T>,
) -> DecisionWeights<T> {
    let prepared = PreparedWeights::from_probabilities(&lottery.probabilities(), params.alpha);
    let split = loss_split(&lottery.utilities(), T::zero(), r);
    prepared.decision_weights(split)
}

/// Subjective utility of a discrete prospect: the decision-weighted sum of
/// outcome values.
pub fn subjective_utility_discrete<T: Real>(
    lottery: &OutcomeLottery<T>,
    r: T,
    params: &CptParams<T>,
) -> T {
    let prepared = PreparedWeights::from_probabilities(&lottery.probabilities(), params.alpha);
    eval_prepared(&lottery.utilities(), T::zero(), &prepared, r, params)
}

/// Settings for valuing a continuous prospect by quantile discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization<T> {
    /// Initial number of equal-probability quantile atoms.
    pub atoms: usize,
    /// Refinement stops once doubling the atom count moves the result by
    /// less than this.
    pub tolerance: T,
    /// Maximum number of doublings before reporting non-convergence.
    pub max_refinements: u32,
}

impl<T: Real> Default for Discretization<T> {
    fn default() -> Self {
        Self {
            atoms: 4096,
            tolerance: T::c(1e-6),
            max_refinements: 8,
        }
    }
}

/// Subjective utility of a continuous prospect `X + shift` against reference
/// `r`, by refining an equal-probability quantile discretization until two
/// successive refinements agree within the configured tolerance.
///
/// Distributions with finitely many atoms are evaluated exactly.
pub fn subjective_utility_continuous<T: Real>(
    dist: &BoundedDistribution<T>,
    shift: T,
    r: T,
    params: &CptParams<T>,
    settings: &Discretization<T>,
) -> Result<T, CptError> {
    if dist.is_discrete() {
        let (utilities, probabilities) = dist.native_atoms();
        let prepared = PreparedWeights::from_probabilities(&probabilities, params.alpha);
        return Ok(eval_prepared(&utilities, shift, &prepared, r, params));
    }
    let mut atoms = settings.atoms.max(2);
    let mut previous = quantile_grid_utility(dist, atoms, shift, r, params);
    for _ in 0..settings.max_refinements {
        atoms *= 2;
        let refined = quantile_grid_utility(dist, atoms, shift, r, params);
        if (refined - previous).abs() <= settings.tolerance {
            return Ok(refined);
        }
        previous = refined;
    }
    Err(CptError::NonConvergence {
        delta: f64::NAN,
        tolerance: settings.tolerance.widen(),
        atoms,
    })
}

pub(crate) fn quantile_grid_utility<T: Real>(
    dist: &BoundedDistribution<T>,
    atoms: usize,
    shift: T,
    r: T,
    params: &CptParams<T>,
) -> T {
    let values = dist.quantile_midpoints(atoms);
    let prepared = PreparedWeights::uniform(atoms, params.alpha);
    eval_prepared(&values, shift, &prepared, r, params)
}

/// Independent cross-check of the continuous subjective utility by adaptive
/// quadrature in probability space.
///
/// Each side of the reference is an integral of the outcome value against the
/// distorted cumulative (or decumulative) measure; substituting the distorted
/// mass itself as the integration variable (via the closed-form Prelec
/// inverse) makes the integrand bounded, so plain adaptive Simpson applies
/// even though the distortion density is unbounded at the endpoints.
pub fn subjective_utility_quadrature<T: Real>(
    dist: &BoundedDistribution<T>,
    shift: T,
    r: T,
    params: &CptParams<T>,
    tolerance: T,
) -> Result<T, CptError> {
    if dist.is_discrete() {
        return Err(CptError::QuadratureRequiresContinuous);
    }
    let alpha = params.alpha;
    let q_split = clamp01(dist.cdf(r - shift));
    let loss_mass = prelec_unchecked(q_split, alpha);
    let gain_mass = prelec_unchecked(T::one() - q_split, alpha);
    let inv_alpha = alpha.recip();

    let mut total = T::zero();
    if loss_mass > T::zero() {
        let loss = adaptive_simpson(
            |y| {
                let q = prelec_unchecked(clamp01(y), inv_alpha);
                let u = dist.quantile_clamped(q) + shift;
                value(u.min(r), r, params)
            },
            T::zero(),
            loss_mass,
            tolerance,
            60,
        )?;
        total = total + loss;
    }
    if gain_mass > T::zero() {
        let gain = adaptive_simpson(
            |y| {
                let q = T::one() - prelec_unchecked(clamp01(y), inv_alpha);
                let u = dist.quantile_clamped(q) + shift;
                value(u.max(r), r, params)
            },
            T::zero(),
            gain_mass,
            tolerance,
            60,
        )?;
        total = total + gain;
    }
    Ok(total)
}
