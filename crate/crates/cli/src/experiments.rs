//! The three acceptance-curve experiments: the fourfold pattern of risk
//! attitudes, strong aversion over mixed prospects, and the self-reference
//! comparison.

use serde::Serialize;
use serde_json::json;

use smods_cpt::behavior::Reference;
use smods_cpt::dist::BoundedDistribution;
use smods_cpt::pricing::mixed_prospect_band;
use smods_cpt::{BoundedDistribution64, CptParams64, Reference64};

use crate::error::CliError;
use crate::report::{ExperimentReport, ReportMetadata};
use crate::scenario::{linspace, Scenario};

/// Default number of grid points over an experiment-feasible tariff range.
pub const DEFAULT_RANGE_STEPS: usize = 200;

/// Poisson configuration of the self-reference experiment.
pub const SELF_REF_POISSON_RATE: f64 = 4.0;
pub const SELF_REF_POISSON_MAX_DELAYS: usize = 5;

// ---------------------------------------------------------------------------
// Fourfold pattern
// ---------------------------------------------------------------------------

/// One quadrant of the fourfold pattern: whether the offer is framed as a
/// gain (reference at the worst case) or a loss (reference at the best case),
/// and whether the non-reference outcome is likely or rare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    HighProbGain,
    HighProbLoss,
    LowProbGain,
    LowProbLoss,
}

impl Quadrant {
    pub fn all() -> [Quadrant; 4] {
        [
            Quadrant::HighProbGain,
            Quadrant::HighProbLoss,
            Quadrant::LowProbGain,
            Quadrant::LowProbLoss,
        ]
    }

    pub fn letter(&self) -> char {
        match self {
            Quadrant::HighProbGain => 'a',
            Quadrant::HighProbLoss => 'b',
            Quadrant::LowProbGain => 'c',
            Quadrant::LowProbLoss => 'd',
        }
    }

    /// Gain quadrants anchor the reference at the worst case.
    pub fn gain_framed(&self) -> bool {
        matches!(self, Quadrant::HighProbGain | Quadrant::LowProbGain)
    }

    /// Probability of the worst-case outcome over the best-case one, chosen
    /// so the non-reference outcome realizes with the requested probability.
    pub fn delay_rate(&self, non_reference_probability: f64) -> f64 {
        let p = non_reference_probability;
        match self {
            // Non-reference outcome is the best case.
            Quadrant::HighProbGain => (1.0 - p) / p,
            Quadrant::LowProbGain => p / (1.0 - p),
            // Non-reference outcome is the worst case.
            Quadrant::HighProbLoss => p / (1.0 - p),
            Quadrant::LowProbLoss => (1.0 - p) / p,
        }
    }

    /// Sign of the relative attractiveness predicted by the fourfold
    /// pattern: positive (risk averse) on the diagonal quadrants.
    pub fn predicted_ra_positive(&self) -> bool {
        matches!(self, Quadrant::HighProbGain | Quadrant::LowProbLoss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FourfoldVariant {
    FullCpt,
    WeightingOnly,
}

impl FourfoldVariant {
    pub fn label(&self) -> &'static str {
        match self {
            FourfoldVariant::FullCpt => "full",
            FourfoldVariant::WeightingOnly => "weighting_only",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FourfoldConfig {
    pub non_reference_probability: f64,
    pub quadrant: Quadrant,
    pub variant: FourfoldVariant,
}

impl FourfoldConfig {
    pub fn new(
        non_reference_probability: f64,
        quadrant: Quadrant,
        variant: FourfoldVariant,
    ) -> Result<Self, CliError> {
        if !(non_reference_probability > 0.5 && non_reference_probability < 1.0) {
            return Err(CliError::Config(format!(
                "non-reference probability must lie in (0.5, 1), got {non_reference_probability}"
            )));
        }
        Ok(Self {
            non_reference_probability,
            quadrant,
            variant,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FourfoldRun {
    pub report: ExperimentReport,
    pub quadrant: Quadrant,
    pub variant: FourfoldVariant,
    pub predicted_ra_positive: bool,
    /// Whether every grid row matches the predicted sign.
    pub sign_matches_prediction: bool,
    /// Number of sign flips of the relative attractiveness along the grid.
    pub sign_changes: usize,
    pub feasible_range: (f64, f64),
}

/// Runs one quadrant/variant of the fourfold experiment: a single-delay
/// offer whose two outcomes are the support endpoints, a dynamic reference
/// riding one of them, and the tariff grid clipped to keep the alternative
/// inside the same gain or loss regime.
pub fn run_fourfold(scenario: &Scenario, config: &FourfoldConfig) -> Result<FourfoldRun, CliError> {
    let support = scenario.support;
    if support.is_degenerate() {
        return Err(CliError::Config(
            "fourfold experiment needs a nondegenerate utility support".into(),
        ));
    }
    let b = scenario.coefficients.per_currency;
    if !(b < 0.0) {
        return Err(CliError::Config(
            "fourfold experiment needs a strictly negative tariff coefficient".into(),
        ));
    }
    let rate = config.quadrant.delay_rate(config.non_reference_probability);
    let distribution = BoundedDistribution::trunc_poisson(support, rate, 1)?;

    let anchor = if config.quadrant.gain_framed() {
        support.lower()
    } else {
        support.upper()
    };
    let reference = Reference::Dynamic { anchor };

    // Keep the alternative in the same regime as the offer: below the
    // reference-anchored outcome for gain frames, above it for loss frames.
    let alternative = scenario.alternative.objective_utility;
    let boundary = (alternative - anchor) / b;
    let (feasible_low, feasible_high) = if config.quadrant.gain_framed() {
        (boundary.max(scenario.grid.min), scenario.grid.max)
    } else {
        (scenario.grid.min, boundary.min(scenario.grid.max))
    };
    if !(feasible_low < feasible_high) {
        return Err(CliError::Config(format!(
            "quadrant {} has no feasible tariffs inside the grid [{}, {}]",
            config.quadrant.letter(),
            scenario.grid.min,
            scenario.grid.max
        )));
    }
    // Strictly inside the open feasible interval.
    let steps = DEFAULT_RANGE_STEPS;
    let span = feasible_high - feasible_low;
    let tariffs: Vec<f64> = (0..steps)
        .map(|i| feasible_low + span * (i as f64 + 1.0) / (steps as f64 + 1.0))
        .collect();

    let params = match config.variant {
        FourfoldVariant::FullCpt => scenario.params,
        FourfoldVariant::WeightingOnly => scenario.params.weighting_only(),
    };
    let curve = scenario.curve_for(&distribution, params)?;

    let name = format!(
        "fourfold_{}_{}",
        config.quadrant.letter(),
        config.variant.label()
    );
    let metadata = ReportMetadata::new(
        "fourfold",
        &scenario.hash,
        json!({
            "quadrant": config.quadrant.letter().to_string(),
            "variant": config.variant.label(),
            "non_reference_probability": config.non_reference_probability,
            "delay_rate": rate,
            "reference_anchor_utils": anchor,
            "feasible_range_currency": [feasible_low, feasible_high],
        }),
    );
    let report = ExperimentReport::over_grid(&name, metadata, &curve, &reference, &tariffs)?;

    let predicted = config.quadrant.predicted_ra_positive();
    let mut sign_matches = true;
    let mut sign_changes = 0usize;
    let mut last_positive: Option<bool> = None;
    for row in &report.rows {
        let positive = row.relative_attractiveness > 0.0;
        if positive != predicted {
            sign_matches = false;
        }
        if let Some(last) = last_positive {
            if last != positive {
                sign_changes += 1;
            }
        }
        last_positive = Some(positive);
    }

    Ok(FourfoldRun {
        report,
        quadrant: config.quadrant,
        variant: config.variant,
        predicted_ra_positive: predicted,
        sign_matches_prediction: sign_matches,
        sign_changes,
        feasible_range: (feasible_low, feasible_high),
    })
}

// ---------------------------------------------------------------------------
// Mixed prospects
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BandSummary {
    pub tariff_lower: f64,
    /// `None` when the band is unbounded above (unit gain exponent).
    pub tariff_upper: Option<f64>,
    pub subjective_utility_at_mean: f64,
}

#[derive(Debug, Clone)]
pub struct MixedRun {
    pub report: ExperimentReport,
    pub band: BandSummary,
    /// Subjective acceptance sits strictly below the objective one on every
    /// grid row inside the band.
    pub dominance_holds_inside_band: bool,
}

/// Runs the mixed-prospect experiment under a mean-anchored dynamic
/// reference: plots both acceptance probabilities for tariffs at which the
/// alternative is a non-loss and reports the aversion band.
pub fn run_mixed(scenario: &Scenario) -> Result<MixedRun, CliError> {
    run_mixed_with_params(scenario, scenario.params, "mixed")
}

pub fn run_mixed_with_params(
    scenario: &Scenario,
    params: CptParams64,
    name: &str,
) -> Result<MixedRun, CliError> {
    let curve = scenario.curve_for(&scenario.x_distribution, params)?;
    let band = mixed_prospect_band(&curve).map_err(CliError::from)?;
    let reference = Reference::Dynamic {
        anchor: curve.x_mean(),
    };

    // Fair comparison: tariffs at which the alternative is a non-loss
    // relative to the mean-anchored reference.
    let low = band.tariff_lower.max(scenario.grid.min);
    let high = scenario.grid.max;
    if !(low < high) {
        return Err(CliError::Config(format!(
            "mixed experiment range [{low}, {high}] is empty; extend the tariff grid"
        )));
    }
    let tariffs = linspace(low, high, DEFAULT_RANGE_STEPS);
    let metadata = ReportMetadata::new(
        "mixed",
        &scenario.hash,
        json!({
            "band_tariff_lower": band.tariff_lower,
            "band_tariff_upper": band.tariff_upper,
            "subjective_utility_at_mean": band.subjective_utility_at_mean,
            "params": {
                "alpha": params.alpha,
                "beta_plus": params.beta_plus,
                "beta_minus": params.beta_minus,
                "lambda": params.lambda,
            },
        }),
    );
    let report = ExperimentReport::over_grid(name, metadata, &curve, &reference, &tariffs)?;

    let upper = band.tariff_upper.unwrap_or(f64::INFINITY);
    let dominance_holds_inside_band = report
        .rows
        .iter()
        .filter(|row| row.tariff >= band.tariff_lower && row.tariff < upper)
        .all(|row| row.subjective_acceptance < row.objective_acceptance);

    Ok(MixedRun {
        report,
        band: BandSummary {
            tariff_lower: band.tariff_lower,
            tariff_upper: band.tariff_upper,
            subjective_utility_at_mean: band.subjective_utility_at_mean,
        },
        dominance_holds_inside_band,
    })
}

/// The mixed experiment with the gain exponent forced to one, which pushes
/// the band's upper end to infinity.
pub fn run_mixed_unit_gain(scenario: &Scenario) -> Result<MixedRun, CliError> {
    let mut params = scenario.params;
    params.beta_plus = 1.0;
    run_mixed_with_params(scenario, params, "mixed_unit_gain")
}

pub fn is_no_band(err: &CliError) -> bool {
    matches!(err, CliError::Property(msg) if msg.contains("no mixed-prospect band"))
}

// ---------------------------------------------------------------------------
// Self reference
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SelfRefRun {
    pub distribution: String,
    /// Offer valued against its own mean.
    pub self_report: ExperimentReport,
    /// Offer valued against the alternative's utility.
    pub alternative_report: ExperimentReport,
    pub dominance_holds: bool,
    pub min_gap: f64,
    /// Probability gap at the tariff where the two references coincide.
    pub crossing_gap: f64,
    pub crossing_tariff: f64,
}

/// The four distributions the self-reference comparison sweeps.
pub fn self_reference_distributions(
    scenario: &Scenario,
) -> Result<Vec<(String, BoundedDistribution64)>, CliError> {
    let support = scenario.support;
    Ok(vec![
        (
            "trunc_normal".to_string(),
            BoundedDistribution::trunc_normal(support)?,
        ),
        (
            "trunc_exp_optimistic".to_string(),
            BoundedDistribution::trunc_exp_optimistic(support)?,
        ),
        (
            "trunc_exp_pessimistic".to_string(),
            BoundedDistribution::trunc_exp_pessimistic(support)?,
        ),
        (
            "trunc_poisson".to_string(),
            BoundedDistribution::trunc_poisson(
                support,
                SELF_REF_POISSON_RATE,
                SELF_REF_POISSON_MAX_DELAYS,
            )?,
        ),
    ])
}

/// Compares the mean-anchored reference against the alternative-anchored
/// one on identical tariff grids, for all four distributions.
///
/// The grid is clipped to tariffs at which the alternative is a non-loss
/// (the same fair-comparison range as the mixed experiment); the two
/// references coincide at its lower end.
pub fn run_self_reference(scenario: &Scenario) -> Result<Vec<SelfRefRun>, CliError> {
    run_self_reference_with(scenario, scenario.params, DEFAULT_RANGE_STEPS)
}

pub fn run_self_reference_with(
    scenario: &Scenario,
    params: CptParams64,
    steps: usize,
) -> Result<Vec<SelfRefRun>, CliError> {
    let alternative = scenario.alternative.objective_utility;
    let b = scenario.coefficients.per_currency;
    let mut runs = Vec::new();
    for (label, distribution) in self_reference_distributions(scenario)? {
        let curve = scenario.curve_for(&distribution, params)?;
        let crossing = (alternative - curve.x_mean()) / b;
        let low = crossing.max(scenario.grid.min);
        let high = scenario.grid.max;
        if !(low < high) {
            return Err(CliError::Config(format!(
                "self-reference range [{low}, {high}] is empty; extend the tariff grid"
            )));
        }
        let tariffs = linspace(low, high, steps);
        let self_reference: Reference64 = Reference::Dynamic {
            anchor: curve.x_mean(),
        };
        let alt_reference: Reference64 = Reference::Static(alternative);

        let config = json!({
            "distribution": label,
            "crossing_tariff_currency": crossing,
            "range_currency": [low, high],
        });
        let self_report = ExperimentReport::over_grid(
            &format!("self_ref_{label}_mean"),
            ReportMetadata::new("self_reference", &scenario.hash, config.clone()),
            &curve,
            &self_reference,
            &tariffs,
        )?;
        let alternative_report = ExperimentReport::over_grid(
            &format!("self_ref_{label}_alternative"),
            ReportMetadata::new("self_reference", &scenario.hash, config),
            &curve,
            &alt_reference,
            &tariffs,
        )?;

        let mut min_gap = f64::INFINITY;
        for (own, alt) in self_report.rows.iter().zip(&alternative_report.rows) {
            min_gap = min_gap.min(own.subjective_acceptance - alt.subjective_acceptance);
        }
        let crossing_gap = (curve.subjective_acceptance(crossing, &self_reference)?
            - curve.subjective_acceptance(crossing, &alt_reference)?)
        .abs();

        runs.push(SelfRefRun {
            distribution: label,
            self_report,
            alternative_report,
            dominance_holds: min_gap >= 0.0,
            min_gap,
            crossing_gap,
            crossing_tariff: crossing,
        });
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Strictness;
    use std::path::Path;

    fn scenario() -> Scenario {
        Scenario::load(
            Path::new(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../scenarios/paper_table1.json"
            )),
            Strictness::Strict,
        )
        .unwrap()
    }

    #[test]
    fn weighting_only_signs_match_all_four_quadrants() {
        let scenario = scenario();
        for quadrant in Quadrant::all() {
            let config =
                FourfoldConfig::new(0.95, quadrant, FourfoldVariant::WeightingOnly).unwrap();
            let run = run_fourfold(&scenario, &config).unwrap();
            assert!(
                run.sign_matches_prediction,
                "quadrant {} violated its prediction",
                quadrant.letter()
            );
            assert_eq!(run.sign_changes, 0);
        }
    }

    #[test]
    fn full_cpt_violates_the_pattern_somewhere() {
        let scenario = scenario();
        let mut any_sign_change = false;
        for quadrant in Quadrant::all() {
            let config = FourfoldConfig::new(0.95, quadrant, FourfoldVariant::FullCpt).unwrap();
            let run = run_fourfold(&scenario, &config).unwrap();
            any_sign_change |= run.sign_changes > 0;
        }
        assert!(any_sign_change);
    }

    #[test]
    fn unit_alpha_zeroes_relative_attractiveness_in_the_weighting_variant() {
        let mut scenario = scenario();
        scenario.params.alpha = 1.0;
        let config = FourfoldConfig::new(
            0.95,
            Quadrant::HighProbGain,
            FourfoldVariant::WeightingOnly,
        )
        .unwrap();
        let run = run_fourfold(&scenario, &config).unwrap();
        for row in &run.report.rows {
            assert!(row.relative_attractiveness.abs() < 1e-12);
        }
    }

    #[test]
    fn fourfold_rows_respect_the_feasibility_constraint() {
        let scenario = scenario();
        for quadrant in Quadrant::all() {
            let config = FourfoldConfig::new(0.95, quadrant, FourfoldVariant::FullCpt).unwrap();
            let run = run_fourfold(&scenario, &config).unwrap();
            let b = scenario.coefficients.per_currency;
            for row in &run.report.rows {
                if quadrant.gain_framed() {
                    assert!(scenario.support.lower() + b * row.tariff < -5.17);
                } else {
                    assert!(scenario.support.upper() + b * row.tariff > -5.17);
                }
            }
        }
    }

    #[test]
    fn infeasible_quadrant_range_is_a_config_error() {
        let mut scenario = scenario();
        // Gain quadrants need tariffs above ten; cap the grid below that.
        scenario.grid.max = 5.0;
        let config =
            FourfoldConfig::new(0.95, Quadrant::HighProbGain, FourfoldVariant::FullCpt).unwrap();
        assert!(matches!(
            run_fourfold(&scenario, &config),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invalid_non_reference_probability_is_rejected() {
        assert!(FourfoldConfig::new(0.4, Quadrant::HighProbGain, FourfoldVariant::FullCpt)
            .is_err());
        assert!(FourfoldConfig::new(1.0, Quadrant::HighProbGain, FourfoldVariant::FullCpt)
            .is_err());
    }

    #[test]
    fn mixed_band_matches_the_published_range() {
        let scenario = scenario();
        let run = run_mixed(&scenario).unwrap();
        assert!((run.band.tariff_lower - 11.0).abs() <= 1.0);
        assert!((run.band.tariff_upper.unwrap() - 20.0).abs() <= 1.0);
        assert!(run.dominance_holds_inside_band);
    }

    #[test]
    fn unit_gain_exponent_reports_an_unbounded_band() {
        let scenario = scenario();
        let run = run_mixed_unit_gain(&scenario).unwrap();
        assert!(run.band.tariff_upper.is_none());
    }

    #[test]
    fn neutral_loss_aversion_has_no_band() {
        let mut scenario = scenario();
        scenario.params.lambda = 1.0;
        let err = run_mixed(&scenario).unwrap_err();
        assert!(is_no_band(&err));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn self_reference_dominates_for_all_distributions() {
        let scenario = scenario();
        let runs = run_self_reference(&scenario).unwrap();
        assert_eq!(runs.len(), 4);
        for run in &runs {
            assert!(
                run.dominance_holds,
                "{} violated dominance by {}",
                run.distribution, run.min_gap
            );
            assert!(run.crossing_gap < 1e-6);
        }
    }

    #[test]
    fn degenerate_parameters_collapse_both_references_to_the_objective_curve() {
        let mut scenario = scenario();
        scenario.params = smods_cpt::cpt::CptParams::rational();
        let runs = run_self_reference_with(&scenario, scenario.params, 50).unwrap();
        for run in &runs {
            for (own, alt) in run
                .self_report
                .rows
                .iter()
                .zip(&run.alternative_report.rows)
            {
                assert!((own.subjective_acceptance - own.objective_acceptance).abs() < 1e-6);
                assert!((alt.subjective_acceptance - alt.objective_acceptance).abs() < 1e-6);
            }
        }
    }
}
