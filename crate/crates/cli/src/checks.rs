//! Property certification: runs the numeric invariant suites of every module
//! against a scenario and reports one pass/fail/skip line per check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use smods_cpt::adaptive_simpson;
use smods_cpt::behavior::Reference;
use smods_cpt::cpt::{
    prelec_weight, subjective_utility_continuous, subjective_utility_discrete,
    subjective_utility_quadrature, value, CptParams, OutcomeLottery,
};
use smods_cpt::dist::BoundedDistribution;
use smods_cpt::pricing::{
    desired_probability, lambda_star, mixed_prospect_band, solve_tariff, EwtState, HPolicy,
    PricingError,
};
use smods_cpt::Reference64;

use crate::error::CliError;
use crate::report::ReportRow;
use crate::scenario::{linspace, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub scenario_hash: String,
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != CheckStatus::Fail)
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| {
                let tag = match e.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skip => "SKIP",
                };
                if e.detail.is_empty() {
                    format!("{tag} {}", e.name)
                } else {
                    format!("{tag} {}: {}", e.name, e.detail)
                }
            })
            .collect()
    }
}

type CheckResult = Result<Option<String>, String>;

fn pass() -> CheckResult {
    Ok(None)
}

fn skip(reason: impl Into<String>) -> CheckResult {
    Ok(Some(reason.into()))
}

fn fail(reason: impl Into<String>) -> CheckResult {
    Err(reason.into())
}

type Check = Box<dyn Fn(&Scenario) -> CheckResult>;

/// Runs the full invariant suite. Configuration problems (an unusable grid,
/// a broken scenario) surface as errors before any check executes.
pub fn run_property_check(scenario: &Scenario) -> Result<CheckReport, CliError> {
    // Fails on scenarios the checks cannot even evaluate.
    let curve = scenario.curve()?;
    drop(curve);

    let named: Vec<(&str, Check)> = vec![
        ("prelec_fixed_point", Box::new(check_prelec_fixed_point)),
        ("prelec_monotone", Box::new(check_prelec_monotone)),
        ("value_monotone", Box::new(check_value_monotone)),
        ("eut_degeneracy", Box::new(check_eut_degeneracy)),
        (
            "cdf_quantile_round_trip",
            Box::new(check_cdf_quantile_round_trip),
        ),
        ("density_normalization", Box::new(check_density_normalization)),
        (
            "atomize_mean_convergence",
            Box::new(check_atomize_mean_convergence),
        ),
        ("poisson_term_by_term", Box::new(check_poisson_terms)),
        (
            "static_reference_monotonicity",
            Box::new(check_static_monotonicity),
        ),
        (
            "dynamic_reference_invariance",
            Box::new(check_dynamic_invariance),
        ),
        (
            "acceptance_degeneracy",
            Box::new(check_acceptance_degeneracy),
        ),
        ("loss_aversion_threshold", Box::new(check_lambda_threshold)),
        ("mixed_prospect_band", Box::new(check_mixed_band)),
        ("band_root_uniqueness", Box::new(check_band_root_uniqueness)),
        (
            "desired_probability_range",
            Box::new(check_desired_probability),
        ),
        ("solver_round_trip", Box::new(check_solver_round_trip)),
        ("oracle_equivalence", Box::new(check_oracle_equivalence)),
        ("stochastic_dominance", Box::new(check_fosd)),
        ("report_row_consistency", Box::new(check_row_consistency)),
    ];

    let mut entries = Vec::with_capacity(named.len());
    for (name, check) in named {
        let entry = match check(scenario) {
            Ok(None) => CheckEntry {
                name: name.to_string(),
                status: CheckStatus::Pass,
                detail: String::new(),
            },
            Ok(Some(reason)) => CheckEntry {
                name: name.to_string(),
                status: CheckStatus::Skip,
                detail: reason,
            },
            Err(reason) => CheckEntry {
                name: name.to_string(),
                status: CheckStatus::Fail,
                detail: reason,
            },
        };
        entries.push(entry);
    }
    Ok(CheckReport {
        scenario_hash: scenario.hash.clone(),
        entries,
    })
}

fn check_prelec_fixed_point(_: &Scenario) -> CheckResult {
    let inv_e = 1.0 / std::f64::consts::E;
    for alpha in [0.1, 0.3, 0.5, 0.74, 0.92, 1.0] {
        let w = prelec_weight(inv_e, alpha).map_err(|e| e.to_string())?;
        if (w - inv_e).abs() >= 1e-12 {
            return fail(format!("fixed point off by {} at alpha {alpha}", w - inv_e));
        }
    }
    pass()
}

fn check_prelec_monotone(scenario: &Scenario) -> CheckResult {
    for alpha in [0.3, scenario.params.alpha, 1.0] {
        let mut previous = -1.0;
        for i in 0..=10_000 {
            let p = i as f64 / 10_000.0;
            let w = prelec_weight(p, alpha).map_err(|e| e.to_string())?;
            if w <= previous {
                return fail(format!("not strictly increasing at p = {p}, alpha = {alpha}"));
            }
            previous = w;
        }
    }
    pass()
}

fn check_value_monotone(scenario: &Scenario) -> CheckResult {
    let params = scenario.params;
    let r = scenario.x_distribution.mean();
    let mut previous = f64::NEG_INFINITY;
    for i in 0..=10_000 {
        let u = r - 5.0 + 10.0 * i as f64 / 10_000.0;
        let v = value(u, r, &params);
        if v <= previous {
            return fail(format!("value not strictly increasing at u = {u}"));
        }
        previous = v;
    }
    pass()
}

fn check_eut_degeneracy(_: &Scenario) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rational = CptParams::rational();
    for _ in 0..200 {
        let lottery = random_lottery(&mut rng, 8);
        let subjective = subjective_utility_discrete(&lottery, 0.0, &rational);
        if (subjective - lottery.mean()).abs() >= 1e-12 {
            return fail(format!(
                "subjective {} differs from expectation {}",
                subjective,
                lottery.mean()
            ));
        }
    }
    pass()
}

fn continuous_kinds(scenario: &Scenario) -> Vec<BoundedDistribution<f64>> {
    let support = scenario.support;
    if support.is_degenerate() {
        return Vec::new();
    }
    vec![
        BoundedDistribution::trunc_normal(support).expect("valid support"),
        BoundedDistribution::trunc_exp_optimistic(support).expect("valid support"),
        BoundedDistribution::trunc_exp_pessimistic(support).expect("valid support"),
    ]
}

fn check_cdf_quantile_round_trip(scenario: &Scenario) -> CheckResult {
    let kinds = continuous_kinds(scenario);
    if kinds.is_empty() {
        return skip("degenerate support has no continuous kinds");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for dist in kinds {
        let support = dist.support();
        for _ in 0..1000 {
            let x = support.lower() + rng.gen::<f64>() * support.width();
            let back = dist.quantile(dist.cdf(x)).map_err(|e| e.to_string())?;
            if (back - x).abs() >= 1e-9 {
                return fail(format!("round trip {back} vs {x}"));
            }
        }
    }
    pass()
}

fn check_density_normalization(scenario: &Scenario) -> CheckResult {
    let kinds = continuous_kinds(scenario);
    if kinds.is_empty() {
        return skip("degenerate support has no continuous kinds");
    }
    for dist in kinds {
        let support = dist.support();
        let integral = adaptive_simpson(
            |x| dist.density(x).unwrap_or(0.0),
            support.lower(),
            support.upper(),
            1e-10,
            50,
        )
        .map_err(|e| e.to_string())?;
        if (integral - 1.0).abs() >= 1e-8 {
            return fail(format!("density integrates to {integral}"));
        }
    }
    pass()
}

fn check_atomize_mean_convergence(scenario: &Scenario) -> CheckResult {
    let kinds = continuous_kinds(scenario);
    if kinds.is_empty() {
        return skip("degenerate support has no continuous kinds");
    }
    for dist in kinds {
        let exact = dist.mean();
        let mut previous = f64::INFINITY;
        let mut n = 64;
        while n <= 4096 {
            let lottery = dist.atomize(n).map_err(|e| e.to_string())?;
            let err = (lottery.mean() - exact).abs();
            if err > previous + 1e-12 {
                return fail(format!("atomize error grew to {err} at n = {n}"));
            }
            previous = err;
            n *= 2;
        }
    }
    pass()
}

fn check_poisson_terms(scenario: &Scenario) -> CheckResult {
    if scenario.support.is_degenerate() {
        return skip("degenerate support");
    }
    for max_delays in [1usize, 5, 12, 20] {
        for rate in [0.25, 4.0, 11.0] {
            let dist = BoundedDistribution::trunc_poisson(scenario.support, rate, max_delays)
                .map_err(|e| e.to_string())?;
            let lottery = dist.atomize(1).map_err(|e| e.to_string())?;
            let direct: Vec<f64> = (0..=max_delays)
                .map(|k| {
                    let factorial: f64 = (1..=k).map(|j| j as f64).product();
                    rate.powi(k as i32) / factorial
                })
                .collect();
            let total: f64 = direct.iter().sum();
            for (i, atom) in lottery.atoms().iter().enumerate() {
                let k = max_delays - i;
                let expected = direct[k] / total;
                if (atom.probability - expected).abs() >= 1e-12 {
                    return fail(format!(
                        "delay {k} probability {} vs direct {expected}",
                        atom.probability
                    ));
                }
            }
        }
    }
    pass()
}

fn check_static_monotonicity(scenario: &Scenario) -> CheckResult {
    let curve = scenario.curve().map_err(|e| e.to_string())?;
    let tariffs = linspace(scenario.grid.min, scenario.grid.max, 1000);
    let references = [
        Reference::Static(scenario.alternative.objective_utility),
        Reference::Static(scenario.x_distribution.mean()),
        Reference::Static(0.0),
    ];
    for reference in &references {
        let mut previous = f64::INFINITY;
        for &tariff in &tariffs {
            let p = curve
                .subjective_acceptance(tariff, reference)
                .map_err(|e| e.to_string())?;
            if p >= previous {
                return fail(format!("not strictly decreasing at tariff {tariff}"));
            }
            previous = p;
        }
    }
    pass()
}

fn check_dynamic_invariance(scenario: &Scenario) -> CheckResult {
    let curve = scenario.curve().map_err(|e| e.to_string())?;
    let reference = Reference::Dynamic {
        anchor: scenario.x_distribution.mean(),
    };
    let tariffs = linspace(scenario.grid.min, scenario.grid.max, 1000);
    let baseline = curve
        .subjective_utility(tariffs[0], &reference)
        .map_err(|e| e.to_string())?;
    let mut previous_alt = f64::NEG_INFINITY;
    let mut previous_p = f64::INFINITY;
    for &tariff in &tariffs {
        let subjective = curve
            .subjective_utility(tariff, &reference)
            .map_err(|e| e.to_string())?;
        if (subjective - baseline).abs() >= 1e-9 {
            return fail(format!(
                "offer utility moved by {} at tariff {tariff}",
                subjective - baseline
            ));
        }
        let alt = curve.alternative_subjective(tariff, &reference);
        if alt <= previous_alt {
            return fail(format!("alternative value not increasing at {tariff}"));
        }
        previous_alt = alt;
        let p = curve
            .subjective_acceptance(tariff, &reference)
            .map_err(|e| e.to_string())?;
        if p >= previous_p {
            return fail(format!("acceptance not decreasing at {tariff}"));
        }
        previous_p = p;
    }
    pass()
}

fn check_acceptance_degeneracy(scenario: &Scenario) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rational = CptParams::rational();
    for case in 0..50 {
        let max_delays = 1 + (case % 6);
        let rate = 0.2 + rng.gen::<f64>() * 8.0;
        let dist = BoundedDistribution::trunc_poisson(scenario.support, rate, max_delays)
            .map_err(|e| e.to_string())?;
        let curve = scenario
            .curve_for(&dist, rational)
            .map_err(|e| e.to_string())?;
        let tariff = scenario.grid.min
            + rng.gen::<f64>() * (scenario.grid.max - scenario.grid.min);
        let subjective = curve
            .subjective_acceptance(tariff, &Reference::Static(0.0))
            .map_err(|e| e.to_string())?;
        let objective = curve.objective_acceptance(tariff);
        if (subjective - objective).abs() >= 1e-10 {
            return fail(format!(
                "subjective {subjective} vs objective {objective} at tariff {tariff}"
            ));
        }
    }
    pass()
}

fn check_lambda_threshold(scenario: &Scenario) -> CheckResult {
    if scenario.support.is_degenerate() {
        return skip("degenerate support");
    }
    let mut kinds = continuous_kinds(scenario);
    kinds.push(
        BoundedDistribution::trunc_poisson(scenario.support, 4.0, 5).expect("valid support"),
    );
    let params = scenario.params;
    let mut skipped = None;
    for dist in kinds {
        let lottery = dist.atomize(4096).map_err(|e| e.to_string())?;
        let threshold = match lambda_star(&lottery, &params) {
            Ok(t) => t,
            Err(PricingError::DegenerateProspect) => {
                return skip("prospect has no loss-side mass at its mean")
            }
            Err(e) => return fail(e.to_string()),
        };
        // The threshold is the exact zero of the mean-referenced utility.
        let mean = lottery.mean();
        let at = |lambda: f64| {
            CptParams::new_relaxed(params.alpha, params.beta_plus, params.beta_minus, lambda)
                .map(|p| subjective_utility_discrete(&lottery, mean, &p))
                .map_err(|e| e.to_string())
        };
        let above = at(threshold + 1e-3)?;
        let below = at(threshold - 1e-3)?;
        if !(above < 0.0 && below > 0.0) {
            return fail(format!(
                "threshold {threshold} does not straddle zero ({below} / {above})"
            ));
        }
        if scenario.params.lambda > threshold {
            let at_scenario = at(scenario.params.lambda)?;
            if at_scenario >= 0.0 {
                return fail(format!(
                    "loss aversion {} above threshold {threshold} but utility {at_scenario} >= 0",
                    scenario.params.lambda
                ));
            }
        } else {
            skipped = Some(format!(
                "scenario loss aversion {} does not exceed the threshold {threshold:.4}; \
                 perceived-loss assertion not applicable",
                scenario.params.lambda
            ));
        }
    }
    match skipped {
        Some(reason) => skip(reason),
        None => pass(),
    }
}

fn check_mixed_band(scenario: &Scenario) -> CheckResult {
    let curve = scenario.curve().map_err(|e| e.to_string())?;
    let band = match mixed_prospect_band(&curve) {
        Ok(band) => band,
        Err(PricingError::NoBand { subjective_utility }) => {
            return skip(format!(
                "no band: mean-referenced subjective utility {subjective_utility} \
                 is not negative"
            ))
        }
        Err(e) => return fail(e.to_string()),
    };
    let upper = match band.tariff_upper {
        Some(upper) => upper,
        None => return skip("band is unbounded above (unit gain exponent)"),
    };
    let reference = Reference::Dynamic {
        anchor: curve.x_mean(),
    };
    for i in 0..1000 {
        let tariff = band.tariff_lower + (upper - band.tariff_lower) * (i as f64 + 0.5) / 1001.0;
        let subjective = curve
            .subjective_acceptance(tariff, &reference)
            .map_err(|e| e.to_string())?;
        let objective = curve.objective_acceptance(tariff);
        if subjective >= objective {
            return fail(format!("aversion fails inside the band at tariff {tariff}"));
        }
    }
    pass()
}

fn check_band_root_uniqueness(scenario: &Scenario) -> CheckResult {
    let beta_plus = scenario.params.beta_plus;
    if beta_plus >= 1.0 {
        return skip("unit gain exponent has no finite upper band edge");
    }
    let mut previous = f64::NEG_INFINITY;
    for i in 0..=1000 {
        let delta = 1.0 + 19.0 * i as f64 / 1000.0;
        let g = delta - delta.powf(beta_plus);
        if g <= previous {
            return fail(format!("band equation not strictly increasing at {delta}"));
        }
        previous = g;
    }
    pass()
}

fn check_desired_probability(scenario: &Scenario) -> CheckResult {
    let policy = scenario
        .policy
        .unwrap_or(HPolicy::Logistic {
            gain_per_minute: 0.3,
        });
    for before in [0.0, 5.0, 12.0] {
        for after in [0.0, 2.0, 6.0, 30.0, 240.0] {
            for target in [0.0, 6.0, 15.0] {
                let state = EwtState::new(before, after, target).map_err(|e| e.to_string())?;
                let p = desired_probability(&state, &policy).map_err(|e| e.to_string())?;
                if !(p > 0.0 && p < 1.0) {
                    return fail(format!("desired probability {p} outside (0, 1)"));
                }
            }
        }
    }
    pass()
}

fn check_solver_round_trip(scenario: &Scenario) -> CheckResult {
    let curve = scenario.curve().map_err(|e| e.to_string())?;
    let reference = scenario.reference;
    for anchor_tariff in [
        scenario.grid.min + 0.3 * (scenario.grid.max - scenario.grid.min),
        scenario.grid.min + 0.6 * (scenario.grid.max - scenario.grid.min),
    ] {
        let target = curve
            .subjective_acceptance(anchor_tariff, &reference)
            .map_err(|e| e.to_string())?;
        let solution = solve_tariff(&curve, &reference, target, None, &scenario.solver)
            .map_err(|e| e.to_string())?;
        let achieved = curve
            .subjective_acceptance(solution.tariff, &reference)
            .map_err(|e| e.to_string())?;
        if (achieved - target).abs() >= 1e-4 {
            return fail(format!(
                "round trip missed the target by {}",
                achieved - target
            ));
        }
    }
    pass()
}

fn check_oracle_equivalence(scenario: &Scenario) -> CheckResult {
    if scenario.x_distribution.is_discrete() {
        return skip("scenario distribution is discrete; quadrature oracle not applicable");
    }
    let b = scenario.coefficients.per_currency;
    let mean = scenario.x_distribution.mean();
    for tariff in [scenario.grid.min, scenario.crossing_tariff(), scenario.grid.max] {
        let shift = b * tariff;
        let r = mean + shift;
        let discretized = subjective_utility_continuous(
            &scenario.x_distribution,
            shift,
            r,
            &scenario.params,
            &scenario.discretization,
        )
        .map_err(|e| e.to_string())?;
        let quadrature =
            subjective_utility_quadrature(&scenario.x_distribution, shift, r, &scenario.params, 1e-8)
                .map_err(|e| e.to_string())?;
        let rel = (discretized - quadrature).abs() / quadrature.abs().max(1e-6);
        if rel >= 1e-4 {
            return fail(format!(
                "discretized {discretized} vs quadrature {quadrature} at tariff {tariff}"
            ));
        }
    }
    pass()
}

fn check_fosd(scenario: &Scenario) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let params = scenario.params;
    for _ in 0..1000 {
        let base = random_lottery(&mut rng, 7);
        let n = base.len();
        let mut shifted: Vec<f64> = base.atoms().iter().map(|a| a.probability).collect();
        for _ in 0..3 {
            let from = rng.gen_range(0..n);
            let to = rng.gen_range(0..n);
            if from < to {
                let moved = shifted[from] * rng.gen::<f64>() * 0.5;
                shifted[from] -= moved;
                shifted[to] += moved;
            }
        }
        let dominating = OutcomeLottery::from_pairs(
            base.atoms()
                .iter()
                .zip(&shifted)
                .filter(|(_, &p)| p > 1e-12)
                .map(|(a, &p)| (a.utility, p))
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let reference = -10.0 + rng.gen::<f64>() * 20.0;
        let worse = subjective_utility_discrete(&base, reference, &params);
        let better = subjective_utility_discrete(&dominating, reference, &params);
        if better < worse - 1e-12 {
            return fail(format!("dominance reversal: {better} < {worse}"));
        }
    }
    pass()
}

fn check_row_consistency(scenario: &Scenario) -> CheckResult {
    let curve = scenario.curve().map_err(|e| e.to_string())?;
    let reference: Reference64 = scenario.reference;
    for tariff in linspace(scenario.grid.min, scenario.grid.max, 200) {
        let row = ReportRow::compute(&curve, tariff, &reference).map_err(|e| e.to_string())?;
        let expected = (row.objective_utility - row.alternative_objective_utility)
            - (row.subjective_utility - row.alternative_subjective_utility);
        if (row.relative_attractiveness - expected).abs() > 1e-12 {
            return fail("relative attractiveness is not the row identity".to_string());
        }
        if row.relative_attractiveness > 1e-9
            && row.objective_acceptance <= row.subjective_acceptance
        {
            return fail(format!("positive RA without objective dominance at {tariff}"));
        }
        if row.relative_attractiveness < -1e-9
            && row.objective_acceptance >= row.subjective_acceptance
        {
            return fail(format!("negative RA without subjective dominance at {tariff}"));
        }
    }
    pass()
}

fn random_lottery(rng: &mut ChaCha8Rng, max_atoms: usize) -> OutcomeLottery<f64> {
    let n = 2 + rng.gen_range(0..max_atoms.max(3) - 1);
    let mut utilities: Vec<f64> = (0..n)
        .map(|i| -8.0 + 16.0 * i as f64 / n as f64 + rng.gen::<f64>())
        .collect();
    utilities.sort_by(|a, b| a.partial_cmp(b).unwrap());
    utilities.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let weights: Vec<f64> = (0..utilities.len())
        .map(|_| 0.05 + rng.gen::<f64>())
        .collect();
    let total: f64 = weights.iter().sum();
    OutcomeLottery::from_pairs(
        utilities
            .into_iter()
            .zip(weights)
            .map(|(u, w)| (u, w / total))
            .collect(),
    )
    .expect("constructed lottery is valid")
}
