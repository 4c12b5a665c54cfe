//! Tariff design on top of the behavioral model: monotone inversion of the
//! acceptance curve, the loss-aversion threshold above which a mean-referenced
//! prospect is perceived as a strict loss, the tariff band on which the
//! subjective acceptance sits below the objective one, and the
//! waiting-time-driven target probability hook.

use thiserror::Error;

use crate::behavior::{AcceptanceCurve, BehaviorError, Reference};
use crate::cpt::{loss_split, CptParams, OutcomeLottery, PreparedWeights};
use crate::num::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("bracket must satisfy low < high (got [{low}, {high}])")]
    InvalidBracket { low: f64, high: f64 },
    #[error(
        "target probability {p_star} outside the bracket's acceptance range \
         [{at_high}, {at_low}]"
    )]
    BracketExcludesTarget {
        p_star: f64,
        at_low: f64,
        at_high: f64,
    },
    #[error("no bracket found after {expansions} expansions around {guess}")]
    BracketNotFound { guess: f64, expansions: usize },
    #[error("target probability {p_star} outside (0, 1)")]
    InvalidTarget { p_star: f64 },
    #[error("solver did not converge within {iterations} iterations")]
    SolverNonConvergence { iterations: usize },
    #[error("prospect has no loss-side mass below its mean")]
    DegenerateProspect,
    #[error(
        "no mixed-prospect band: the mean-referenced subjective utility \
         {subjective_utility} is not negative"
    )]
    NoBand { subjective_utility: f64 },
    #[error("unknown desired-probability policy '{kind}'")]
    UnknownPolicy { kind: String },
    #[error("policy parameter {name} = {value} is invalid")]
    InvalidPolicyParameter { name: &'static str, value: f64 },
    #[error("waiting time {name} = {value} must be nonnegative and finite")]
    InvalidWaitingTime { name: &'static str, value: f64 },
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// Tariff interval expected to contain the solution: acceptance at `low`
/// must sit at or above the target and at `high` at or below it (acceptance
/// decreases in the tariff). The relation is verified by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TariffBracket<T> {
    pub low: T,
    pub high: T,
}

impl<T: Real> TariffBracket<T> {
    pub fn new(low: T, high: T) -> Result<Self, PricingError> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(PricingError::InvalidBracket {
                low: low.widen(),
                high: high.widen(),
            });
        }
        Ok(Self { low, high })
    }
}

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings<T> {
    /// Acceptable probability error of the returned tariff.
    pub probability_tolerance: T,
    /// Acceptable width of the final tariff interval.
    pub tariff_tolerance: T,
    pub max_iterations: usize,
    /// Cap on bracket-expansion doublings when no bracket is supplied.
    pub max_bracket_expansions: usize,
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            probability_tolerance: T::c(1e-4),
            tariff_tolerance: T::c(1e-6),
            max_iterations: 200,
            max_bracket_expansions: 60,
        }
    }
}

/// A solved tariff with its residual diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TariffSolution<T> {
    pub tariff: T,
    pub achieved_probability: T,
    pub probability_error: T,
    /// Width of the final bisection interval around the tariff.
    pub interval_width: T,
    pub iterations: usize,
}

/// Finds the tariff at which the subjective acceptance equals `p_star`, by
/// bisection on the strictly decreasing acceptance curve.
///
/// If no bracket is supplied, one is discovered by geometric expansion
/// around the tariff at which the mean offer utility matches the
/// alternative.
pub fn solve_tariff<T: Real>(
    curve: &AcceptanceCurve<T>,
    reference: &Reference<T>,
    p_star: T,
    bracket: Option<TariffBracket<T>>,
    settings: &SolverSettings<T>,
) -> Result<TariffSolution<T>, PricingError> {
    if !(p_star > T::zero() && p_star < T::one()) {
        return Err(PricingError::InvalidTarget {
            p_star: p_star.widen(),
        });
    }
    let accept = |tariff: T| -> Result<T, PricingError> {
        Ok(curve.subjective_acceptance(tariff, reference)?)
    };

    let (mut low, mut high) = match bracket {
        Some(bracket) => {
            let at_low = accept(bracket.low)?;
            let at_high = accept(bracket.high)?;
            if p_star > at_low || p_star < at_high {
                return Err(PricingError::BracketExcludesTarget {
                    p_star: p_star.widen(),
                    at_low: at_low.widen(),
                    at_high: at_high.widen(),
                });
            }
            (bracket.low, bracket.high)
        }
        None => expand_bracket(&accept, curve, p_star, settings)?,
    };

    let mut best = low;
    let mut best_p = accept(low)?;
    for iteration in 1..=settings.max_iterations {
        let mid = (low + high) / T::c(2.0);
        let p_mid = accept(mid)?;
        best = mid;
        best_p = p_mid;
        if p_mid > p_star {
            low = mid;
        } else {
            high = mid;
        }
        let width = high - low;
        let error = (p_mid - p_star).abs();
        if error <= settings.probability_tolerance && width <= settings.tariff_tolerance {
            return Ok(TariffSolution {
                tariff: mid,
                achieved_probability: p_mid,
                probability_error: error,
                interval_width: width,
                iterations: iteration,
            });
        }
    }
    let error = (best_p - p_star).abs();
    if error <= settings.probability_tolerance {
        return Ok(TariffSolution {
            tariff: best,
            achieved_probability: best_p,
            probability_error: error,
            interval_width: high - low,
            iterations: settings.max_iterations,
        });
    }
    Err(PricingError::SolverNonConvergence {
        iterations: settings.max_iterations,
    })
}

fn expand_bracket<T: Real, F>(
    accept: &F,
    curve: &AcceptanceCurve<T>,
    p_star: T,
    settings: &SolverSettings<T>,
) -> Result<(T, T), PricingError>
where
    F: Fn(T) -> Result<T, PricingError>,
{
    // Center the search where the mean offer utility meets the alternative.
    let b = curve.per_currency();
    let guess = if b < T::zero() {
        (curve.alternative_objective() - curve.x_mean()) / b
    } else {
        T::zero()
    };
    let mut step = T::one();
    let mut low = guess - step;
    let mut high = guess + step;
    for _ in 0..settings.max_bracket_expansions {
        let at_low = accept(low)?;
        let at_high = accept(high)?;
        if at_low >= p_star && at_high <= p_star {
            return Ok((low, high));
        }
        step = step * T::c(2.0);
        if at_low < p_star {
            low = low - step;
        }
        if at_high > p_star {
            high = high + step;
        }
    }
    Err(PricingError::BracketNotFound {
        guess: guess.widen(),
        expansions: settings.max_bracket_expansions,
    })
}

/// Loss-aversion threshold of a lottery referenced at its own mean: the ratio
/// of the distortion-weighted gain mass to the loss mass. For any
/// `lambda` above it the mean-referenced subjective utility is negative;
/// at the threshold it is exactly zero.
///
/// The `lambda` field of `params` is ignored.
pub fn lambda_star<T: Real>(
    lottery: &OutcomeLottery<T>,
    params: &CptParams<T>,
) -> Result<T, PricingError> {
    let mean = lottery.mean();
    let utilities: Vec<T> = lottery.atoms().iter().map(|a| a.utility).collect();
    let probabilities: Vec<T> = lottery.atoms().iter().map(|a| a.probability).collect();
    let split = loss_split(&utilities, T::zero(), mean);
    if split == 0 {
        return Err(PricingError::DegenerateProspect);
    }
    let prepared = PreparedWeights::from_probabilities(&probabilities, params.alpha);
    let mut losses = T::zero();
    for (i, &u) in utilities.iter().enumerate().take(split) {
        losses = losses + prepared.loss_weight(i) * (mean - u).powf(params.beta_minus);
    }
    let mut gains = T::zero();
    for (i, &u) in utilities.iter().enumerate().skip(split) {
        gains = gains + prepared.gain_weight(i) * (u - mean).powf(params.beta_plus);
    }
    if !(losses > T::zero()) {
        return Err(PricingError::DegenerateProspect);
    }
    Ok(gains / losses)
}

/// Tariff band on which a mean-referenced passenger is strictly less likely
/// to accept than a rational one.
///
/// The band starts where the mean offer utility meets the alternative and
/// ends where the perceived advantage of the certain alternative stops
/// exceeding its objective advantage. A unit gain exponent pushes the upper
/// end to infinity, reported as `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedProspectBand<T> {
    pub tariff_lower: T,
    pub tariff_upper: Option<T>,
    /// Objective utility gap `alternative - mean offer` at the upper end.
    pub delta_upper: Option<T>,
    /// The tariff-invariant mean-referenced subjective utility of the offer.
    pub subjective_utility_at_mean: T,
}

/// Guard against calling a symmetric prospect (subjective utility exactly
/// zero up to roundoff) mixed-averse.
const BAND_GUARD: f64 = 1e-12;

/// Computes the mixed-prospect band for a curve whose parameters make the
/// mean-referenced subjective utility negative.
pub fn mixed_prospect_band<T: Real>(
    curve: &AcceptanceCurve<T>,
) -> Result<MixedProspectBand<T>, PricingError> {
    let b = curve.per_currency();
    let tariff_lower = (curve.alternative_objective() - curve.x_mean()) / b;
    let reference = Reference::Dynamic {
        anchor: curve.x_mean(),
    };
    // Invariant under the tariff for a dynamic mean reference.
    let subjective = curve.subjective_utility(tariff_lower, &reference)?;
    if subjective >= -T::c(BAND_GUARD) {
        return Err(PricingError::NoBand {
            subjective_utility: subjective.widen(),
        });
    }
    if curve.params().beta_plus == T::one() {
        return Ok(MixedProspectBand {
            tariff_lower,
            tariff_upper: None,
            delta_upper: None,
            subjective_utility_at_mean: subjective,
        });
    }
    let delta = band_delta_root(subjective, curve.params().beta_plus)?;
    let tariff_upper = tariff_lower - delta / b;
    Ok(MixedProspectBand {
        tariff_lower,
        tariff_upper: Some(tariff_upper),
        delta_upper: Some(delta),
        subjective_utility_at_mean: subjective,
    })
}

/// Solves `delta - delta^beta_plus = -subjective` for the unique root on
/// `(1, inf)`; the left side strictly increases there from zero.
pub fn band_delta_root<T: Real>(subjective: T, beta_plus: T) -> Result<T, PricingError> {
    let target = -subjective;
    debug_assert!(target > T::zero());
    let g = |delta: T| delta - delta.powf(beta_plus) - target;
    let mut low = T::one();
    let mut high = T::c(2.0);
    let mut expansions = 0usize;
    while g(high) < T::zero() {
        high = high * T::c(2.0);
        expansions += 1;
        if expansions > 300 {
            return Err(PricingError::SolverNonConvergence { iterations: expansions });
        }
    }
    for _ in 0..200 {
        let mid = (low + high) / T::c(2.0);
        if !(mid > low && mid < high) {
            break;
        }
        if g(mid) < T::zero() {
            low = mid;
        } else {
            high = mid;
        }
        let floor = T::epsilon() * high.abs().max(T::one()) * T::c(4.0);
        if high - low <= floor {
            break;
        }
    }
    Ok((low + high) / T::c(2.0))
}

/// Average estimated waiting times around a request: before the decision,
/// after it if the passenger accepts, and the platform target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwtState<T> {
    pub before_minutes: T,
    pub after_accept_minutes: T,
    pub target_minutes: T,
}

impl<T: Real> EwtState<T> {
    pub fn new(
        before_minutes: T,
        after_accept_minutes: T,
        target_minutes: T,
    ) -> Result<Self, PricingError> {
        for (name, value) in [
            ("before_minutes", before_minutes),
            ("after_accept_minutes", after_accept_minutes),
            ("target_minutes", target_minutes),
        ] {
            if !(value >= T::zero()) || !value.is_finite() {
                return Err(PricingError::InvalidWaitingTime {
                    name,
                    value: value.widen(),
                });
            }
        }
        Ok(Self {
            before_minutes,
            after_accept_minutes,
            target_minutes,
        })
    }
}

/// Registered mappings from waiting-time state to a desired acceptance
/// probability.
///
/// `Logistic` balances at one half when accepting would land exactly on the
/// target and decreases as the post-acceptance waiting time overshoots it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HPolicy<T> {
    Logistic { gain_per_minute: T },
    Constant { p_star: T },
}

impl<T: Real> HPolicy<T> {
    /// Resolves a policy descriptor by name; unrecognized names are errors.
    pub fn from_descriptor(
        kind: &str,
        gain_per_minute: Option<T>,
        p_star: Option<T>,
    ) -> Result<Self, PricingError> {
        match kind {
            "logistic" => {
                let gain = gain_per_minute.ok_or(PricingError::InvalidPolicyParameter {
                    name: "gain_per_minute",
                    value: f64::NAN,
                })?;
                if !(gain >= T::zero()) || !gain.is_finite() {
                    return Err(PricingError::InvalidPolicyParameter {
                        name: "gain_per_minute",
                        value: gain.widen(),
                    });
                }
                Ok(Self::Logistic {
                    gain_per_minute: gain,
                })
            }
            "constant" => {
                let p = p_star.ok_or(PricingError::InvalidPolicyParameter {
                    name: "p_star",
                    value: f64::NAN,
                })?;
                if !(p > T::zero() && p < T::one()) {
                    return Err(PricingError::InvalidPolicyParameter {
                        name: "p_star",
                        value: p.widen(),
                    });
                }
                Ok(Self::Constant { p_star: p })
            }
            other => Err(PricingError::UnknownPolicy {
                kind: other.to_string(),
            }),
        }
    }
}

/// Desired acceptance probability for the current waiting-time state,
/// always strictly inside `(0, 1)`.
pub fn desired_probability<T: Real>(
    state: &EwtState<T>,
    policy: &HPolicy<T>,
) -> Result<T, PricingError> {
    match policy {
        HPolicy::Logistic { gain_per_minute } => {
            let overshoot = state.after_accept_minutes - state.target_minutes;
            let p = (T::one() + (*gain_per_minute * overshoot).exp()).recip();
            // Extreme overshoots saturate the logistic in floating point;
            // keep the result strictly inside the open interval.
            Ok(p
                .max(T::min_positive_value())
                .min(T::one() - T::epsilon()))
        }
        HPolicy::Constant { p_star } => Ok(*p_star),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{CertainOption, UtilityCoefficients};
    use crate::cpt::{subjective_utility_discrete, Discretization};
    use crate::dist::{BoundedDistribution, SupportInterval};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn calibration_curve(params: CptParams<f64>) -> AcceptanceCurve<f64> {
        let support = SupportInterval::new(-3.47, -3.07).unwrap();
        let dist = BoundedDistribution::trunc_normal(support).unwrap();
        let coefficients =
            UtilityCoefficients::new(-0.03, -0.0374, -0.0626, -0.17, -1.6436).unwrap();
        AcceptanceCurve::new(
            coefficients,
            &dist,
            CertainOption::new(-5.17),
            params,
            &Discretization::default(),
        )
        .unwrap()
    }

    #[test]
    fn bracket_validation() {
        assert!(TariffBracket::new(1.0, 1.0).is_err());
        assert!(TariffBracket::new(2.0, 1.0).is_err());
        assert!(TariffBracket::new(1.0, 2.0).is_ok());
    }

    #[test]
    fn solver_round_trips_a_precomputed_probability() {
        let params = CptParams::new(0.74, 0.88, 0.88, 2.25).unwrap();
        let curve = calibration_curve(params);
        let reference = Reference::Static(-5.17);
        let settings = SolverSettings::default();
        let target = curve.subjective_acceptance(13.5, &reference).unwrap();
        let solution = solve_tariff(
            &curve,
            &reference,
            target,
            Some(TariffBracket::new(0.0, 30.0).unwrap()),
            &settings,
        )
        .unwrap();
        assert_abs_diff_eq!(solution.tariff, 13.5, epsilon = 1e-4);
        assert!(solution.probability_error < 1e-4);
    }

    #[test]
    fn degenerate_parameters_give_the_closed_form_indifference_tariff() {
        let curve = calibration_curve(CptParams::rational());
        let reference = Reference::Static(0.0);
        let settings = SolverSettings {
            tariff_tolerance: 1e-9,
            probability_tolerance: 1e-10,
            ..SolverSettings::default()
        };
        let solution = solve_tariff(&curve, &reference, 0.5, None, &settings).unwrap();
        // Mean utility equals the alternative: tariff = (A - X̄) / b.
        let expected = (-5.17 - (-3.27)) / -0.17;
        assert_abs_diff_eq!(solution.tariff, expected, epsilon = 1e-6);
    }

    #[test]
    fn automatic_bracket_expansion_finds_extreme_targets() {
        let params = CptParams::new(0.74, 0.88, 0.88, 2.25).unwrap();
        let curve = calibration_curve(params);
        let reference = Reference::Dynamic { anchor: -3.27 };
        let settings = SolverSettings::default();
        for p_star in [0.97, 0.5, 0.03] {
            let solution = solve_tariff(&curve, &reference, p_star, None, &settings).unwrap();
            let achieved = curve
                .subjective_acceptance(solution.tariff, &reference)
                .unwrap();
            assert_abs_diff_eq!(achieved, p_star, epsilon = 1e-4);
        }
    }

    #[test]
    fn bracket_excluding_the_target_is_an_error() {
        let params = CptParams::new(0.74, 0.88, 0.88, 2.25).unwrap();
        let curve = calibration_curve(params);
        let reference = Reference::Static(-5.17);
        let bracket = TariffBracket::new(25.0, 30.0).unwrap();
        let result = solve_tariff(
            &curve,
            &reference,
            0.9,
            Some(bracket),
            &SolverSettings::default(),
        );
        assert!(matches!(
            result,
            Err(PricingError::BracketExcludesTarget { .. })
        ));
        assert!(solve_tariff(
            &curve,
            &reference,
            1.2,
            None,
            &SolverSettings::default()
        )
        .is_err());
    }

    #[test]
    fn symmetric_lottery_threshold_is_one() {
        let lottery = OutcomeLottery::from_pairs(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let params = CptParams::new(1.0, 0.88, 0.88, 1.0).unwrap();
        assert_relative_eq!(lambda_star(&lottery, &params).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn threshold_zeroes_the_mean_referenced_utility() {
        let lottery = OutcomeLottery::from_pairs(vec![
            (-2.0, 0.2),
            (-0.5, 0.3),
            (0.8, 0.35),
            (2.5, 0.15),
        ])
        .unwrap();
        let base = CptParams::new(0.74, 0.88, 0.7, 1.0).unwrap();
        let threshold = lambda_star(&lottery, &base).unwrap();
        let mean = lottery.mean();
        let at = |lambda: f64| {
            let params = CptParams::new_relaxed(0.74, 0.88, 0.7, lambda).unwrap();
            subjective_utility_discrete(&lottery, mean, &params)
        };
        assert_abs_diff_eq!(at(threshold), 0.0, epsilon = 1e-9);
        assert!(at(threshold + 1e-3) < 0.0);
        assert!(at(threshold - 1e-3) > 0.0);
    }

    #[test]
    fn gain_only_prospect_is_degenerate() {
        let lottery = OutcomeLottery::from_pairs(vec![(1.0, 1.0)]).unwrap();
        let params = CptParams::new(0.74, 0.88, 0.88, 1.0).unwrap();
        assert_eq!(
            lambda_star(&lottery, &params),
            Err(PricingError::DegenerateProspect)
        );
    }

    #[test]
    fn band_delta_root_golden_ratio_case() {
        // delta - sqrt(delta) = 1 has the square of the golden ratio as root.
        let delta = band_delta_root(-1.0, 0.5).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(delta, golden * golden, epsilon = 1e-10);
    }

    #[test]
    fn band_left_side_strictly_increases_past_one() {
        // Mirrors the uniqueness argument for the upper band edge.
        for beta in [0.5, 0.7, 0.88, 0.99] {
            let mut previous = f64::NEG_INFINITY;
            for i in 0..=1000 {
                let delta = 1.0 + 9.0 * i as f64 / 1000.0;
                let g = delta - delta.powf(beta);
                assert!(g > previous);
                previous = g;
            }
        }
    }

    #[test]
    fn band_exists_for_loss_averse_parameters() {
        let params = CptParams::new(0.74, 0.88, 0.88, 2.25).unwrap();
        let curve = calibration_curve(params);
        let band = mixed_prospect_band(&curve).unwrap();
        assert!(band.subjective_utility_at_mean < 0.0);
        let upper = band.tariff_upper.unwrap();
        assert!(band.tariff_lower < upper);

        // The band edges satisfy their defining equations.
        let b = curve.per_currency();
        let mean_at_lower = curve.x_mean() + b * band.tariff_lower;
        assert_abs_diff_eq!(mean_at_lower, curve.alternative_objective(), epsilon = 1e-9);
        let delta = band.delta_upper.unwrap();
        let lhs = delta.powf(0.88) - band.subjective_utility_at_mean;
        assert_abs_diff_eq!(lhs, delta, epsilon = 1e-9);

        // Inside the band the subjective acceptance sits below the objective.
        let reference = Reference::Dynamic {
            anchor: curve.x_mean(),
        };
        for i in 0..100 {
            let tariff = band.tariff_lower
                + (upper - band.tariff_lower) * (i as f64 + 0.5) / 101.0;
            let subjective = curve.subjective_acceptance(tariff, &reference).unwrap();
            let objective = curve.objective_acceptance(tariff);
            assert!(subjective < objective, "tariff {tariff}");
        }
    }

    #[test]
    fn unit_gain_exponent_makes_the_band_unbounded() {
        let params = CptParams::new(0.74, 1.0, 0.88, 2.25).unwrap();
        let curve = calibration_curve(params);
        let band = mixed_prospect_band(&curve).unwrap();
        assert!(band.tariff_upper.is_none());
        assert!(band.delta_upper.is_none());
    }

    #[test]
    fn neutral_loss_aversion_has_no_band_on_a_symmetric_prospect() {
        let params = CptParams::new(0.74, 0.88, 0.88, 1.0).unwrap();
        let curve = calibration_curve(params);
        assert!(matches!(
            mixed_prospect_band(&curve),
            Err(PricingError::NoBand { .. })
        ));
    }

    #[test]
    fn ewt_state_validation() {
        assert!(EwtState::new(5.0, 6.0, 5.5).is_ok());
        assert!(EwtState::new(-1.0, 6.0, 5.5).is_err());
        assert!(EwtState::new(5.0, f64::NAN, 5.5).is_err());
    }

    #[test]
    fn logistic_policy_balances_at_the_target() {
        let policy = HPolicy::from_descriptor("logistic", Some(0.3), None).unwrap();
        let state = EwtState::new(7.0, 6.0, 6.0).unwrap();
        assert_relative_eq!(
            desired_probability(&state, &policy).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn zero_gain_policy_is_constant_one_half() {
        let policy = HPolicy::from_descriptor("logistic", Some(0.0), None).unwrap();
        for after in [0.0, 3.0, 50.0] {
            let state = EwtState::new(5.0, after, 6.0).unwrap();
            assert_eq!(desired_probability(&state, &policy).unwrap(), 0.5);
        }
    }

    #[test]
    fn logistic_policy_hand_value() {
        let policy = HPolicy::from_descriptor("logistic", Some(0.3), None).unwrap();
        let state = EwtState::new(6.0, 11.0, 6.0).unwrap();
        let p = desired_probability(&state, &policy).unwrap();
        assert_relative_eq!(p, 1.0 / (1.0 + 1.5f64.exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.182, epsilon = 1e-3);
    }

    #[test]
    fn policies_stay_inside_the_open_unit_interval() {
        let logistic = HPolicy::from_descriptor("logistic", Some(2.0), None).unwrap();
        for after in [0.0, 1.0, 10.0, 500.0] {
            let state = EwtState::new(5.0, after, 6.0).unwrap();
            let p = desired_probability(&state, &logistic).unwrap();
            assert!(p > 0.0 && p < 1.0, "p = {p} at after = {after}");
        }
    }

    #[test]
    fn unknown_policy_is_rejected() {
        assert!(matches!(
            HPolicy::<f64>::from_descriptor("pid", Some(1.0), None),
            Err(PricingError::UnknownPolicy { .. })
        ));
        assert!(HPolicy::<f64>::from_descriptor("constant", None, Some(0.8)).is_ok());
        assert!(HPolicy::<f64>::from_descriptor("constant", None, Some(1.0)).is_err());
        assert!(HPolicy::<f64>::from_descriptor("logistic", Some(-0.1), None).is_err());
    }
}
