//! Passenger decision model: travel attributes to utilities, reference
//! points, and objective/subjective acceptance probabilities for a binary
//! choice between an uncertain ride offer and a certain alternative.

use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::cpt::{
    self, value, CptError, CptParams, Discretization, PreparedWeights,
};
use crate::dist::{BoundedDistribution, DistError, SupportInterval};
use crate::num::Real;

/// Tolerance separating genuine risk attitudes from discretization noise.
const ATTITUDE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BehaviorError {
    #[error("coefficient {name} = {value} must be nonpositive and finite")]
    InvalidCoefficient { name: &'static str, value: f64 },
    #[error("constant term {value} must be finite")]
    InvalidConstant { value: f64 },
    #[error("travel time {name} = {value} must be nonnegative and finite")]
    InvalidTime { name: &'static str, value: f64 },
    #[error("travel time interval {name} = [{min}, {max}] must satisfy 0 <= min <= max")]
    InvalidTimeInterval {
        name: &'static str,
        min: f64,
        max: f64,
    },
    #[error(
        "offer distribution support [{actual_lower}, {actual_upper}] does not match \
         the bounds-derived support [{expected_lower}, {expected_upper}]"
    )]
    SupportMismatch {
        expected_lower: f64,
        expected_upper: f64,
        actual_lower: f64,
        actual_upper: f64,
    },
    #[error(transparent)]
    Cpt(#[from] CptError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Linear travel-disutility weights: utils per minute of walking, waiting,
/// and riding, utils per currency unit of tariff, plus a constant for
/// everything unobserved. The four weights are nonpositive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityCoefficients<T> {
    pub per_walk_minute: T,
    pub per_wait_minute: T,
    pub per_ride_minute: T,
    pub per_currency: T,
    pub constant: T,
}

impl<T: Real> UtilityCoefficients<T> {
    pub fn new(
        per_walk_minute: T,
        per_wait_minute: T,
        per_ride_minute: T,
        per_currency: T,
        constant: T,
    ) -> Result<Self, BehaviorError> {
        for (name, value) in [
            ("per_walk_minute", per_walk_minute),
            ("per_wait_minute", per_wait_minute),
            ("per_ride_minute", per_ride_minute),
            ("per_currency", per_currency),
        ] {
            if !(value <= T::zero()) || !value.is_finite() {
                return Err(BehaviorError::InvalidCoefficient {
                    name,
                    value: value.widen(),
                });
            }
        }
        if !constant.is_finite() {
            return Err(BehaviorError::InvalidConstant {
                value: constant.widen(),
            });
        }
        Ok(Self {
            per_walk_minute,
            per_wait_minute,
            per_ride_minute,
            per_currency,
            constant,
        })
    }

    /// Implied value of time, in currency per minute of waiting.
    pub fn value_of_time(&self) -> T {
        self.per_wait_minute / self.per_currency
    }
}

/// Realized walking, waiting, and riding times in minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelTimes<T> {
    pub walk_minutes: T,
    pub wait_minutes: T,
    pub ride_minutes: T,
}

impl<T: Real> TravelTimes<T> {
    pub fn new(walk_minutes: T, wait_minutes: T, ride_minutes: T) -> Result<Self, BehaviorError> {
        for (name, value) in [
            ("walk_minutes", walk_minutes),
            ("wait_minutes", wait_minutes),
            ("ride_minutes", ride_minutes),
        ] {
            if !(value >= T::zero()) || !value.is_finite() {
                return Err(BehaviorError::InvalidTime {
                    name,
                    value: value.widen(),
                });
            }
        }
        Ok(Self {
            walk_minutes,
            wait_minutes,
            ride_minutes,
        })
    }
}

/// Interval of minutes a travel-time component may realize in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval<T> {
    pub min: T,
    pub max: T,
}

impl<T: Real> TimeInterval<T> {
    pub fn new(name: &'static str, min: T, max: T) -> Result<Self, BehaviorError> {
        if !(min >= T::zero() && min <= max) || !max.is_finite() {
            return Err(BehaviorError::InvalidTimeInterval {
                name,
                min: min.widen(),
                max: max.widen(),
            });
        }
        Ok(Self { min, max })
    }
}

/// Per-component travel time intervals quoted with the ride offer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelTimeBounds<T> {
    pub walk: TimeInterval<T>,
    pub wait: TimeInterval<T>,
    pub ride: TimeInterval<T>,
}

/// Objective utility of a transportation option with known attributes:
/// the coefficient-weighted times plus the tariff term and the constant.
pub fn objective_utility<T: Real>(
    coefficients: &UtilityCoefficients<T>,
    times: &TravelTimes<T>,
    tariff: T,
) -> T {
    coefficients.per_walk_minute * times.walk_minutes
        + coefficients.per_wait_minute * times.wait_minutes
        + coefficients.per_ride_minute * times.ride_minutes
        + coefficients.per_currency * tariff
        + coefficients.constant
}

/// Utility range induced by the travel-time intervals: the lower end takes
/// the maximal times (coefficients are nonpositive), the upper the minimal.
pub fn x_bounds<T: Real>(
    coefficients: &UtilityCoefficients<T>,
    bounds: &TravelTimeBounds<T>,
) -> SupportInterval<T> {
    let at = |walk, wait, ride| {
        coefficients.per_walk_minute * walk
            + coefficients.per_wait_minute * wait
            + coefficients.per_ride_minute * ride
            + coefficients.constant
    };
    let lower = at(bounds.walk.max, bounds.wait.max, bounds.ride.max);
    let upper = at(bounds.walk.min, bounds.wait.min, bounds.ride.min);
    if lower < upper {
        SupportInterval::new(lower, upper).expect("bounds are finite and ordered")
    } else {
        SupportInterval::point(lower).expect("bounds are finite")
    }
}

/// An uncertain ride offer: a distribution over the stochastic utility
/// component, the quoted tariff, and the passenger's coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RideOffer<T> {
    pub coefficients: UtilityCoefficients<T>,
    pub x_distribution: BoundedDistribution<T>,
    pub tariff: T,
}

impl<T: Real> RideOffer<T> {
    pub fn new(
        coefficients: UtilityCoefficients<T>,
        x_distribution: BoundedDistribution<T>,
        tariff: T,
    ) -> Self {
        Self {
            coefficients,
            x_distribution,
            tariff,
        }
    }

    /// Verifies that the distribution support equals the bounds-derived one.
    pub fn check_support(&self, bounds: &TravelTimeBounds<T>) -> Result<(), BehaviorError> {
        let expected = x_bounds(&self.coefficients, bounds);
        let actual = self.x_distribution.support();
        let tol = T::c(1e-9);
        if (expected.lower() - actual.lower()).abs() > tol
            || (expected.upper() - actual.upper()).abs() > tol
        {
            return Err(BehaviorError::SupportMismatch {
                expected_lower: expected.lower().widen(),
                expected_upper: expected.upper().widen(),
                actual_lower: actual.lower().widen(),
                actual_upper: actual.upper().widen(),
            });
        }
        Ok(())
    }

    /// Mean objective utility of the offer, `E[X] + b * tariff`.
    pub fn mean_utility(&self) -> T {
        self.x_distribution.mean() + self.coefficients.per_currency * self.tariff
    }
}

/// The certain alternative, reduced to its objective utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertainOption<T> {
    pub objective_utility: T,
}

impl<T: Real> CertainOption<T> {
    pub fn new(objective_utility: T) -> Self {
        Self { objective_utility }
    }

    pub fn from_attributes(
        coefficients: &UtilityCoefficients<T>,
        times: &TravelTimes<T>,
        tariff: T,
    ) -> Self {
        Self {
            objective_utility: objective_utility(coefficients, times, tariff),
        }
    }
}

/// Reference point separating perceived gains from losses.
///
/// `Static` is a fixed utility level; `Dynamic` tracks the tariff and
/// resolves to `anchor + b * tariff` at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference<T> {
    Static(T),
    Dynamic { anchor: T },
}

impl<T: Real> Reference<T> {
    pub fn resolve(&self, per_currency: T, tariff: T) -> T {
        match self {
            Self::Static(r) => *r,
            Self::Dynamic { anchor } => *anchor + per_currency * tariff,
        }
    }
}

/// Multinomial logit choice probabilities over a utility vector, computed
/// with a max shift so extreme utilities cannot overflow.
pub fn discrete_choice<T: Real>(utilities: &[T]) -> Vec<T> {
    assert!(!utilities.is_empty(), "choice set must be nonempty");
    let peak = utilities
        .iter()
        .fold(T::neg_infinity(), |acc, &u| acc.max(u));
    let exps: Vec<T> = utilities.iter().map(|&u| (u - peak).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Binary logit probability of the first option: `1 / (1 + e^(other - this))`.
fn binary_logit<T: Real>(this: T, other: T) -> T {
    (T::one() + (other - this).exp()).recip()
}

/// Objective acceptance probability of the offer against the alternative,
/// a binary logit on the mean offer utility.
pub fn objective_acceptance<T: Real>(offer: &RideOffer<T>, alternative: &CertainOption<T>) -> T {
    binary_logit(offer.mean_utility(), alternative.objective_utility)
}

/// Subjective utility of the offer under the given reference and parameters.
pub fn subjective_offer_utility<T: Real>(
    offer: &RideOffer<T>,
    reference: &Reference<T>,
    params: &CptParams<T>,
    settings: &Discretization<T>,
) -> Result<T, BehaviorError> {
    let b = offer.coefficients.per_currency;
    let shift = b * offer.tariff;
    let r = reference.resolve(b, offer.tariff);
    Ok(cpt::subjective_utility_continuous(
        &offer.x_distribution,
        shift,
        r,
        params,
        settings,
    )?)
}

/// Subjective acceptance probability: a binary logit on the subjective
/// utilities of the offer and of the (certain) alternative.
pub fn subjective_acceptance<T: Real>(
    offer: &RideOffer<T>,
    alternative: &CertainOption<T>,
    reference: &Reference<T>,
    params: &CptParams<T>,
    settings: &Discretization<T>,
) -> Result<T, BehaviorError> {
    let subjective = subjective_offer_utility(offer, reference, params, settings)?;
    let r = reference.resolve(offer.coefficients.per_currency, offer.tariff);
    let alternative_subjective = value(alternative.objective_utility, r, params);
    Ok(binary_logit(subjective, alternative_subjective))
}

/// Risk attitude relative to a rational decision maker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskAttitude {
    RiskAverse,
    Neutral,
    RiskSeeking,
}

/// Classifies the passenger against the rational baseline: seeking if the
/// subjective acceptance exceeds the objective one, averse if below.
pub fn risk_attitude<T: Real>(
    offer: &RideOffer<T>,
    alternative: &CertainOption<T>,
    reference: &Reference<T>,
    params: &CptParams<T>,
    settings: &Discretization<T>,
) -> Result<RiskAttitude, BehaviorError> {
    let subjective = subjective_acceptance(offer, alternative, reference, params, settings)?;
    let objective = objective_acceptance(offer, alternative);
    let tol = T::c(ATTITUDE_TOLERANCE);
    Ok(if subjective > objective + tol {
        RiskAttitude::RiskSeeking
    } else if subjective < objective - tol {
        RiskAttitude::RiskAverse
    } else {
        RiskAttitude::Neutral
    })
}

/// Ordering of the first reference against the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskOrdering {
    MoreRiskAverse,
    Equivalent,
    MoreRiskSeeking,
}

/// Compares two reference points on the same offer: the one producing the
/// lower subjective acceptance is the more risk-averse framing.
pub fn relative_risk_attitude<T: Real>(
    offer: &RideOffer<T>,
    alternative: &CertainOption<T>,
    first: &Reference<T>,
    second: &Reference<T>,
    params: &CptParams<T>,
    settings: &Discretization<T>,
) -> Result<RiskOrdering, BehaviorError> {
    let p_first = subjective_acceptance(offer, alternative, first, params, settings)?;
    let p_second = subjective_acceptance(offer, alternative, second, params, settings)?;
    let tol = T::c(ATTITUDE_TOLERANCE);
    Ok(if p_first < p_second - tol {
        RiskOrdering::MoreRiskAverse
    } else if p_first > p_second + tol {
        RiskOrdering::MoreRiskSeeking
    } else {
        RiskOrdering::Equivalent
    })
}

/// Acceptance probabilities as a function of the tariff, with the offer
/// distribution atomized once and the distorted probability tables reused
/// across the whole sweep.
///
/// Continuous kinds are held at successive refinement levels; every
/// evaluation is accepted only once two consecutive levels agree within the
/// discretization tolerance, adding finer levels on demand.
#[derive(Debug)]
pub struct AcceptanceCurve<T> {
    coefficients: UtilityCoefficients<T>,
    alternative: CertainOption<T>,
    params: CptParams<T>,
    x_mean: T,
    distribution: BoundedDistribution<T>,
    levels: RwLock<Vec<Arc<CurveLevel<T>>>>,
    base_atoms: usize,
    tolerance: T,
    max_refinements: u32,
}

impl<T: Real> Clone for AcceptanceCurve<T> {
    fn clone(&self) -> Self {
        Self {
            coefficients: self.coefficients,
            alternative: self.alternative,
            params: self.params,
            x_mean: self.x_mean,
            distribution: self.distribution.clone(),
            levels: RwLock::new(self.levels.read().expect("curve lock").clone()),
            base_atoms: self.base_atoms,
            tolerance: self.tolerance,
            max_refinements: self.max_refinements,
        }
    }
}

#[derive(Debug, Clone)]
struct CurveLevel<T> {
    utilities: Vec<T>,
    weights: PreparedWeights<T>,
}

impl<T: Real> AcceptanceCurve<T> {
    pub fn new(
        coefficients: UtilityCoefficients<T>,
        x_distribution: &BoundedDistribution<T>,
        alternative: CertainOption<T>,
        params: CptParams<T>,
        settings: &Discretization<T>,
    ) -> Result<Self, BehaviorError> {
        params.validate_relaxed()?;
        let base_atoms = settings.atoms.max(2);
        let levels = if x_distribution.is_discrete() {
            let (utilities, probabilities) = x_distribution.native_atoms();
            let weights = PreparedWeights::from_probabilities(&probabilities, params.alpha);
            vec![Arc::new(CurveLevel { utilities, weights })]
        } else {
            [base_atoms, base_atoms * 2]
                .into_iter()
                .map(|n| {
                    Arc::new(CurveLevel {
                        utilities: x_distribution.quantile_midpoints(n),
                        weights: PreparedWeights::uniform(n, params.alpha),
                    })
                })
                .collect()
        };
        Ok(Self {
            coefficients,
            alternative,
            params,
            x_mean: x_distribution.mean(),
            distribution: x_distribution.clone(),
            levels: RwLock::new(levels),
            base_atoms,
            tolerance: settings.tolerance,
            max_refinements: settings.max_refinements,
        })
    }

    fn level(&self, index: usize) -> Arc<CurveLevel<T>> {
        if let Some(level) = self.levels.read().expect("curve lock").get(index) {
            return Arc::clone(level);
        }
        let mut levels = self.levels.write().expect("curve lock");
        while levels.len() <= index {
            let atoms = self.base_atoms << levels.len();
            levels.push(Arc::new(CurveLevel {
                utilities: self.distribution.quantile_midpoints(atoms),
                weights: PreparedWeights::uniform(atoms, self.params.alpha),
            }));
        }
        Arc::clone(&levels[index])
    }

    pub fn per_currency(&self) -> T {
        self.coefficients.per_currency
    }

    pub fn x_mean(&self) -> T {
        self.x_mean
    }

    pub fn alternative_objective(&self) -> T {
        self.alternative.objective_utility
    }

    pub fn params(&self) -> &CptParams<T> {
        &self.params
    }

    pub fn objective_utility(&self, tariff: T) -> T {
        self.x_mean + self.coefficients.per_currency * tariff
    }

    pub fn objective_acceptance(&self, tariff: T) -> T {
        binary_logit(self.objective_utility(tariff), self.alternative.objective_utility)
    }

    pub fn resolve_reference(&self, reference: &Reference<T>, tariff: T) -> T {
        reference.resolve(self.coefficients.per_currency, tariff)
    }

    pub fn subjective_utility(
        &self,
        tariff: T,
        reference: &Reference<T>,
    ) -> Result<T, BehaviorError> {
        let shift = self.coefficients.per_currency * tariff;
        let r = self.resolve_reference(reference, tariff);
        if self.distribution.is_discrete() {
            let level = self.level(0);
            return Ok(cpt::eval_prepared(
                &level.utilities,
                shift,
                &level.weights,
                r,
                &self.params,
            ));
        }
        let mut previous = None;
        let mut delta = T::zero();
        for index in 0..=(self.max_refinements as usize + 1) {
            let level = self.level(index);
            let result =
                cpt::eval_prepared(&level.utilities, shift, &level.weights, r, &self.params);
            if let Some(coarse) = previous {
                delta = result - coarse;
                if delta.abs() <= self.tolerance {
                    return Ok(result);
                }
            }
            previous = Some(result);
        }
        Err(BehaviorError::Cpt(CptError::NonConvergence {
            delta: delta.widen(),
            tolerance: self.tolerance.widen(),
            atoms: self.base_atoms << (self.max_refinements as usize + 1),
        }))
    }

    pub fn alternative_subjective(&self, tariff: T, reference: &Reference<T>) -> T {
        let r = self.resolve_reference(reference, tariff);
        value(self.alternative.objective_utility, r, &self.params)
    }

    pub fn subjective_acceptance(
        &self,
        tariff: T,
        reference: &Reference<T>,
    ) -> Result<T, BehaviorError> {
        let subjective = self.subjective_utility(tariff, reference)?;
        let alternative = self.alternative_subjective(tariff, reference);
        Ok(binary_logit(subjective, alternative))
    }

    /// Same curve with different behavioral parameters; the distorted
    /// probability tables are reused when the distortion exponent matches.
    pub fn with_params(&self, params: CptParams<T>) -> Result<Self, BehaviorError> {
        params.validate_relaxed()?;
        let levels: Vec<Arc<CurveLevel<T>>> = self
            .levels
            .read()
            .expect("curve lock")
            .iter()
            .map(|level| {
                if params.alpha == self.params.alpha {
                    Arc::clone(level)
                } else {
                    let weights = if self.distribution.is_discrete() {
                        PreparedWeights::from_probabilities(
                            level.weights.probabilities(),
                            params.alpha,
                        )
                    } else {
                        PreparedWeights::uniform(level.utilities.len(), params.alpha)
                    };
                    Arc::new(CurveLevel {
                        utilities: level.utilities.clone(),
                        weights,
                    })
                }
            })
            .collect();
        Ok(Self {
            coefficients: self.coefficients,
            alternative: self.alternative,
            params,
            x_mean: self.x_mean,
            distribution: self.distribution.clone(),
            levels: RwLock::new(levels),
            base_atoms: self.base_atoms,
            tolerance: self.tolerance,
            max_refinements: self.max_refinements,
        })
    }
}
