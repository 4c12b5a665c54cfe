//! Scenario files: a JSON description of the ride offer, the alternative,
//! the behavioral parameters, and the run configuration.
//!
//! Field names carry their units (minutes, utils, currency) because the
//! utility coefficients are unit-coupled and silent unit mismatches are the
//! dominant configuration mistake. Currency values are quoted to cent
//! precision; computation widens them to floating point.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use smods_cpt::behavior::{
    x_bounds, CertainOption, Reference, TimeInterval, TravelTimeBounds, TravelTimes,
    UtilityCoefficients,
};
use smods_cpt::cpt::{CptParams, Discretization, OutcomeLottery};
use smods_cpt::dist::BoundedDistribution;
use smods_cpt::pricing::{HPolicy, SolverSettings};
use smods_cpt::{
    AcceptanceCurve64, BoundedDistribution64, CertainOption64, CptParams64, Discretization64,
    HPolicy64, Reference64, SolverSettings64, SupportInterval64, TravelTimeBounds64,
    UtilityCoefficients64,
};

use crate::error::CliError;

/// How strictly the behavioral parameters are validated. `Diagnostic` admits
/// loss-aversion coefficients below one so the property checker can run on
/// deliberately out-of-model scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Diagnostic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub smods: RawSmods,
    pub alternative: RawAlternative,
    pub cpt: RawCptParams,
    pub reference: RawReference,
    pub tariff_grid: RawTariffGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ewt_policy: Option<RawPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<RawSolver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<RawDiscretization>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSmods {
    pub coefficients: RawCoefficients,
    pub travel_time_bounds_min: RawTimeBounds,
    pub x_distribution: RawDistribution,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoefficients {
    pub walk_utils_per_min: f64,
    pub wait_utils_per_min: f64,
    pub ride_utils_per_min: f64,
    pub tariff_utils_per_currency: f64,
    pub constant_utils: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTimeBounds {
    pub walk: RawInterval,
    pub wait: RawInterval,
    pub ride: RawInterval,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInterval {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RawDistribution {
    #[serde(rename = "trunc_normal")]
    TruncNormal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean_utils: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        std_utils: Option<f64>,
    },
    #[serde(rename = "trunc_exp_optimistic")]
    TruncExpOptimistic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rate_per_util: Option<f64>,
    },
    #[serde(rename = "trunc_exp_pessimistic")]
    TruncExpPessimistic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rate_per_util: Option<f64>,
    },
    #[serde(rename = "trunc_poisson")]
    TruncPoisson { rate: f64, max_delays: usize },
    #[serde(rename = "discrete_atoms")]
    DiscreteAtoms { atoms: Vec<RawAtom> },
    #[serde(rename = "point_mass")]
    PointMass { x_utils: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub x_utils: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAlternative {
    pub coefficients: RawCoefficients,
    pub travel_times_min: RawTravelTimes,
    pub tariff_currency: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTravelTimes {
    pub walk: f64,
    pub wait: f64,
    pub ride: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCptParams {
    pub alpha: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RawReference {
    #[serde(rename = "static")]
    Static { value_utils: f64 },
    #[serde(rename = "dynamic")]
    Dynamic { anchor_utils: f64 },
    /// Dynamic reference anchored at the mean of the offer distribution.
    #[serde(rename = "dynamic_mean")]
    DynamicMean,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTariffGrid {
    pub min_currency: f64,
    pub max_currency: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolicy {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_per_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tariff_tolerance_currency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDiscretization {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_refinements: Option<u32>,
}

/// Evenly spaced tariff grid with `steps` points including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TariffGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl TariffGrid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    debug_assert!(steps >= 2);
    let span = max - min;
    (0..steps)
        .map(|i| min + span * i as f64 / (steps - 1) as f64)
        .collect()
}

/// A parsed and validated scenario, with the core model objects assembled.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub raw: RawScenario,
    pub hash: String,
    pub coefficients: UtilityCoefficients64,
    pub bounds: TravelTimeBounds64,
    pub support: SupportInterval64,
    pub x_distribution: BoundedDistribution64,
    pub alternative: CertainOption64,
    pub params: CptParams64,
    pub reference: Reference64,
    pub grid: TariffGrid,
    pub policy: Option<HPolicy64>,
    pub solver: SolverSettings64,
    pub discretization: Discretization64,
}

impl Scenario {
    pub fn load(path: &Path, strictness: Strictness) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, strictness)
    }

    pub fn from_json(text: &str, strictness: Strictness) -> Result<Self, CliError> {
        let raw: RawScenario = serde_json::from_str(text)?;
        Self::assemble(raw, strictness)
    }

    pub fn assemble(raw: RawScenario, strictness: Strictness) -> Result<Self, CliError> {
        let canonical = serde_json::to_string(&raw)
            .map_err(|e| CliError::Config(format!("scenario not serializable: {e}")))?;
        let hash = hex_digest(canonical.as_bytes());

        let coefficients = build_coefficients(&raw.smods.coefficients)?;
        let bounds = build_bounds(&raw.smods.travel_time_bounds_min)?;
        let support = x_bounds(&coefficients, &bounds);
        let x_distribution = build_distribution(&raw.smods.x_distribution, support)?;

        let alt_coefficients = build_coefficients(&raw.alternative.coefficients)?;
        let alt_times = TravelTimes::new(
            raw.alternative.travel_times_min.walk,
            raw.alternative.travel_times_min.wait,
            raw.alternative.travel_times_min.ride,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        check_cents("alternative.tariff_currency", raw.alternative.tariff_currency)?;
        let alternative =
            CertainOption::from_attributes(&alt_coefficients, &alt_times, raw.alternative.tariff_currency);

        let params = build_params(&raw.cpt, strictness)?;

        let reference = match raw.reference {
            RawReference::Static { value_utils } => Reference::Static(value_utils),
            RawReference::Dynamic { anchor_utils } => Reference::Dynamic {
                anchor: anchor_utils,
            },
            RawReference::DynamicMean => Reference::Dynamic {
                anchor: x_distribution.mean(),
            },
        };

        let grid = build_grid(&raw.tariff_grid)?;

        let policy = match &raw.ewt_policy {
            Some(policy) => Some(
                HPolicy::from_descriptor(&policy.kind, policy.gain_per_min, policy.p_star)
                    .map_err(|e| CliError::Config(e.to_string()))?,
            ),
            None => None,
        };

        let solver = build_solver(raw.solver.as_ref())?;
        let discretization = build_discretization(raw.discretization.as_ref())?;

        Ok(Self {
            raw,
            hash,
            coefficients,
            bounds,
            support,
            x_distribution,
            alternative,
            params,
            reference,
            grid,
            policy,
            solver,
            discretization,
        })
    }

    /// Acceptance curve for the scenario's own distribution and parameters.
    pub fn curve(&self) -> Result<AcceptanceCurve64, CliError> {
        self.curve_for(&self.x_distribution, self.params)
    }

    pub fn curve_for(
        &self,
        distribution: &BoundedDistribution64,
        params: CptParams64,
    ) -> Result<AcceptanceCurve64, CliError> {
        Ok(AcceptanceCurve64::new(
            self.coefficients,
            distribution,
            self.alternative,
            params,
            &self.discretization,
        )?)
    }

    /// Tariff at which the mean offer utility equals the alternative's.
    pub fn crossing_tariff(&self) -> f64 {
        (self.alternative.objective_utility - self.x_distribution.mean())
            / self.coefficients.per_currency
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut acc, b| {
        use std::fmt::Write;
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

fn build_coefficients(raw: &RawCoefficients) -> Result<UtilityCoefficients64, CliError> {
    UtilityCoefficients::new(
        raw.walk_utils_per_min,
        raw.wait_utils_per_min,
        raw.ride_utils_per_min,
        raw.tariff_utils_per_currency,
        raw.constant_utils,
    )
    .map_err(|e| CliError::Config(e.to_string()))
}

fn build_bounds(raw: &RawTimeBounds) -> Result<TravelTimeBounds64, CliError> {
    let make = |name, interval: &RawInterval| {
        TimeInterval::new(name, interval.min, interval.max)
            .map_err(|e| CliError::Config(e.to_string()))
    };
    Ok(TravelTimeBounds {
        walk: make("walk", &raw.walk)?,
        wait: make("wait", &raw.wait)?,
        ride: make("ride", &raw.ride)?,
    })
}

fn build_params(raw: &RawCptParams, strictness: Strictness) -> Result<CptParams64, CliError> {
    let result = match strictness {
        Strictness::Strict => CptParams::new(raw.alpha, raw.beta_plus, raw.beta_minus, raw.lambda),
        Strictness::Diagnostic => {
            CptParams::new_relaxed(raw.alpha, raw.beta_plus, raw.beta_minus, raw.lambda)
        }
    };
    result.map_err(|e| CliError::Config(e.to_string()))
}

fn build_grid(raw: &RawTariffGrid) -> Result<TariffGrid, CliError> {
    if !(raw.min_currency < raw.max_currency) {
        return Err(CliError::Config(format!(
            "tariff grid must satisfy min < max (got [{}, {}])",
            raw.min_currency, raw.max_currency
        )));
    }
    if raw.steps < 2 {
        return Err(CliError::Config(format!(
            "tariff grid needs at least 2 steps (got {})",
            raw.steps
        )));
    }
    check_cents("tariff_grid.min_currency", raw.min_currency)?;
    check_cents("tariff_grid.max_currency", raw.max_currency)?;
    Ok(TariffGrid {
        min: raw.min_currency,
        max: raw.max_currency,
        steps: raw.steps,
    })
}

fn build_solver(raw: Option<&RawSolver>) -> Result<SolverSettings64, CliError> {
    let mut settings = SolverSettings::default();
    if let Some(raw) = raw {
        if let Some(p) = raw.probability_tolerance {
            if !(p > 0.0) {
                return Err(CliError::Config(format!(
                    "solver.probability_tolerance must be positive (got {p})"
                )));
            }
            settings.probability_tolerance = p;
        }
        if let Some(t) = raw.tariff_tolerance_currency {
            if !(t > 0.0) {
                return Err(CliError::Config(format!(
                    "solver.tariff_tolerance_currency must be positive (got {t})"
                )));
            }
            settings.tariff_tolerance = t;
        }
        if let Some(n) = raw.max_iterations {
            if n == 0 {
                return Err(CliError::Config(
                    "solver.max_iterations must be positive".into(),
                ));
            }
            settings.max_iterations = n;
        }
    }
    Ok(settings)
}

fn build_discretization(raw: Option<&RawDiscretization>) -> Result<Discretization64, CliError> {
    let mut settings = Discretization::default();
    if let Some(raw) = raw {
        if let Some(atoms) = raw.atoms {
            if atoms < 2 {
                return Err(CliError::Config(
                    "discretization.atoms must be at least 2".into(),
                ));
            }
            settings.atoms = atoms;
        }
        if let Some(tolerance) = raw.tolerance {
            if !(tolerance > 0.0) {
                return Err(CliError::Config(format!(
                    "discretization.tolerance must be positive (got {tolerance})"
                )));
            }
            settings.tolerance = tolerance;
        }
        if let Some(max_refinements) = raw.max_refinements {
            settings.max_refinements = max_refinements;
        }
    }
    Ok(settings)
}

fn build_distribution(
    raw: &RawDistribution,
    support: SupportInterval64,
) -> Result<BoundedDistribution64, CliError> {
    let needs_width = !matches!(
        raw,
        RawDistribution::PointMass { .. } | RawDistribution::DiscreteAtoms { .. }
    );
    if needs_width && support.is_degenerate() {
        return Err(CliError::Config(format!(
            "travel time bounds induce a degenerate utility support at {}; \
             only a point-mass distribution fits",
            support.lower()
        )));
    }
    let dist = match raw {
        RawDistribution::TruncNormal {
            mean_utils,
            std_utils,
        } => match (mean_utils, std_utils) {
            (None, None) => BoundedDistribution::trunc_normal(support)?,
            (Some(mean), Some(std)) => {
                BoundedDistribution::trunc_normal_with(support, *mean, *std)?
            }
            _ => {
                return Err(CliError::Config(
                    "trunc_normal needs either both mean_utils and std_utils or neither".into(),
                ))
            }
        },
        RawDistribution::TruncExpOptimistic { rate_per_util } => match rate_per_util {
            None => BoundedDistribution::trunc_exp_optimistic(support)?,
            Some(rate) => BoundedDistribution::trunc_exp_optimistic_with(support, *rate)?,
        },
        RawDistribution::TruncExpPessimistic { rate_per_util } => match rate_per_util {
            None => BoundedDistribution::trunc_exp_pessimistic(support)?,
            Some(rate) => BoundedDistribution::trunc_exp_pessimistic_with(support, *rate)?,
        },
        RawDistribution::TruncPoisson { rate, max_delays } => {
            BoundedDistribution::trunc_poisson(support, *rate, *max_delays)?
        }
        RawDistribution::DiscreteAtoms { atoms } => {
            let lottery = OutcomeLottery::from_pairs(
                atoms.iter().map(|a| (a.x_utils, a.probability)).collect(),
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let dist = BoundedDistribution::discrete(lottery)?;
            let actual = dist.support();
            let tol = 1e-9;
            if (actual.lower() - support.lower()).abs() > tol
                || (actual.upper() - support.upper()).abs() > tol
            {
                return Err(CliError::Config(format!(
                    "discrete atoms span [{}, {}] but the travel time bounds induce [{}, {}]",
                    actual.lower(),
                    actual.upper(),
                    support.lower(),
                    support.upper()
                )));
            }
            dist
        }
        RawDistribution::PointMass { x_utils } => {
            if !support.contains(*x_utils) {
                return Err(CliError::Config(format!(
                    "point mass at {x_utils} lies outside the induced support [{}, {}]",
                    support.lower(),
                    support.upper()
                )));
            }
            BoundedDistribution::point_mass(*x_utils)?
        }
    };
    Ok(dist)
}

/// Requires the value to sit on the cent lattice.
fn check_cents(name: &str, value: f64) -> Result<(), CliError> {
    if !value.is_finite() {
        return Err(CliError::Config(format!("{name} = {value} must be finite")));
    }
    let cents = value * 100.0;
    if (cents - cents.round()).abs() > 1e-6 {
        return Err(CliError::Config(format!(
            "{name} = {value} must be quoted to cent precision"
        )));
    }
    Ok(())
}

/// Rounds a solved tariff to the cent lattice for quoting.
pub fn quote_cents(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}
