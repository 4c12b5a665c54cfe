//! Command line runner for the behavioral pricing experiments.
//!
//! Exit codes: 0 on success, 1 for configuration errors, 2 when a property
//! check or experiment assertion fails, 3 on numerical non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use smods_cpt::pricing::{desired_probability, solve_tariff, EwtState, TariffBracket};
use smods_cpt_cli::checks::run_property_check;
use smods_cpt_cli::emit::{
    acceptance_plot, attractiveness_plot, emit_json_value, emit_report, OutputFormat,
};
use smods_cpt_cli::error::CliError;
use smods_cpt_cli::experiments::{
    run_fourfold, run_mixed, run_mixed_unit_gain, run_self_reference, FourfoldConfig,
    FourfoldVariant, Quadrant,
};
use smods_cpt_cli::report::{ExperimentReport, ReportMetadata};
use smods_cpt_cli::scenario::{quote_cents, Scenario, Strictness};
use smods_cpt_cli::svg::VLine;

#[derive(Parser)]
#[command(
    name = "smods-cpt",
    version,
    about = "Behavioral acceptance model and tariff design for shared ride offers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for emitted reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Emission format.
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the tariff that reaches a target acceptance probability.
    Price(PriceArgs),
    /// Reproduce the fourfold pattern of risk attitudes (four quadrants,
    /// full and weighting-only variants).
    Fourfold(FourfoldArgs),
    /// Compare subjective and objective acceptance under a mean-anchored
    /// reference and report the aversion band.
    Mixed(CommonArgs),
    /// Compare the mean-anchored reference against the alternative-anchored
    /// one across the four offer distributions.
    SelfRef(CommonArgs),
    /// Run the property-certification suite against the scenario.
    Check(CheckArgs),
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target acceptance probability in (0, 1). Either this or the waiting
    /// time triple must be given.
    #[arg(long)]
    p_star: Option<f64>,
    /// Average estimated waiting time before the request, minutes.
    #[arg(long)]
    ewt_before: Option<f64>,
    /// Average estimated waiting time if the passenger accepts, minutes.
    #[arg(long)]
    ewt_after: Option<f64>,
    /// Waiting time target, minutes.
    #[arg(long)]
    ewt_target: Option<f64>,
    /// Lower end of the tariff bracket (defaults to automatic discovery).
    #[arg(long)]
    bracket_low: Option<f64>,
    /// Upper end of the tariff bracket.
    #[arg(long)]
    bracket_high: Option<f64>,
}

#[derive(Args)]
struct FourfoldArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Probability of the non-reference outcome.
    #[arg(long, default_value_t = 0.95)]
    p_nr: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Optional directory for the JSON check report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Price(args) => price(args),
        Command::Fourfold(args) => fourfold(args),
        Command::Mixed(args) => mixed(args),
        Command::SelfRef(args) => self_ref(args),
        Command::Check(args) => check(args),
    }
}

fn price(args: PriceArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.common.scenario, Strictness::Strict)?;
    let target = resolve_target(&args, &scenario)?;
    let curve = scenario.curve()?;
    let bracket = match (args.bracket_low, args.bracket_high) {
        (Some(low), Some(high)) => Some(TariffBracket::new(low, high)?),
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "--bracket-low and --bracket-high must be given together".into(),
            ))
        }
    };
    let solution = solve_tariff(&curve, &scenario.reference, target, bracket, &scenario.solver)?;

    println!(
        "tariff = {:.6} (quoted {:.2}), acceptance = {:.6}, target = {target:.6}",
        solution.tariff,
        quote_cents(solution.tariff),
        solution.achieved_probability
    );
    println!(
        "probability error = {:.3e}, interval width = {:.3e}, iterations = {}",
        solution.probability_error, solution.interval_width, solution.iterations
    );

    let metadata = ReportMetadata::new(
        "price",
        &scenario.hash,
        json!({
            "target_probability": target,
            "tariff": solution.tariff,
            "tariff_quoted": quote_cents(solution.tariff),
            "achieved_probability": solution.achieved_probability,
            "probability_error": solution.probability_error,
            "interval_width": solution.interval_width,
            "iterations": solution.iterations,
        }),
    );
    let report = ExperimentReport::over_grid(
        "price",
        metadata,
        &curve,
        &scenario.reference,
        &scenario.grid.points(),
    )?;
    let marker = [VLine {
        x: solution.tariff,
        label: format!("solution {:.2}", quote_cents(solution.tariff)),
    }];
    let path = emit_report(
        &report,
        &args.common.out,
        args.common.format,
        Some(&acceptance_plot(&marker)),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn resolve_target(args: &PriceArgs, scenario: &Scenario) -> Result<f64, CliError> {
    match (args.p_star, args.ewt_after, args.ewt_target) {
        (Some(p), None, None) => Ok(p),
        (None, Some(after), Some(target)) => {
            let policy = scenario.policy.ok_or_else(|| {
                CliError::Config(
                    "scenario has no ewt_policy; pass --p-star or add a policy".into(),
                )
            })?;
            let state = EwtState::new(args.ewt_before.unwrap_or(after), after, target)
                .map_err(CliError::from)?;
            Ok(desired_probability(&state, &policy)?)
        }
        (Some(_), _, _) => Err(CliError::Config(
            "--p-star conflicts with the waiting-time flags".into(),
        )),
        _ => Err(CliError::Config(
            "pass either --p-star or both --ewt-after and --ewt-target".into(),
        )),
    }
}

fn fourfold(args: FourfoldArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.common.scenario, Strictness::Strict)?;
    let mut summary = Vec::new();
    for quadrant in Quadrant::all() {
        for variant in [FourfoldVariant::FullCpt, FourfoldVariant::WeightingOnly] {
            let config = FourfoldConfig::new(args.p_nr, quadrant, variant)?;
            let run = run_fourfold(&scenario, &config)?;
            let path = emit_report(
                &run.report,
                &args.common.out,
                args.common.format,
                Some(&attractiveness_plot()),
            )?;
            println!(
                "quadrant {} [{}]: predicted RA {}, matches = {}, sign changes = {} -> {}",
                quadrant.letter(),
                variant.label(),
                if run.predicted_ra_positive { "positive" } else { "negative" },
                run.sign_matches_prediction,
                run.sign_changes,
                path.display()
            );
            summary.push(json!({
                "quadrant": quadrant.letter().to_string(),
                "variant": variant.label(),
                "predicted_ra_positive": run.predicted_ra_positive,
                "sign_matches_prediction": run.sign_matches_prediction,
                "sign_changes": run.sign_changes,
                "feasible_range_currency": [run.feasible_range.0, run.feasible_range.1],
            }));
        }
    }
    emit_json_value(
        "fourfold_summary",
        &json!({
            "scenario_hash": scenario.hash,
            "non_reference_probability": args.p_nr,
            "runs": summary,
        }),
        &args.common.out,
    )?;
    Ok(())
}

fn mixed(args: CommonArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.scenario, Strictness::Strict)?;
    let run = run_mixed(&scenario)?;
    let band_markers: Vec<VLine> = [
        Some(VLine {
            x: run.band.tariff_lower,
            label: format!("band low {:.2}", run.band.tariff_lower),
        }),
        run.band.tariff_upper.map(|upper| VLine {
            x: upper,
            label: format!("band high {upper:.2}"),
        }),
    ]
    .into_iter()
    .flatten()
    .collect();
    let path = emit_report(
        &run.report,
        &args.out,
        args.format,
        Some(&acceptance_plot(&band_markers)),
    )?;
    println!(
        "band = [{:.4}, {}], mean-referenced utility = {:.6} -> {}",
        run.band.tariff_lower,
        run.band
            .tariff_upper
            .map_or("unbounded".to_string(), |u| format!("{u:.4}")),
        run.band.subjective_utility_at_mean,
        path.display()
    );

    let unit_gain = run_mixed_unit_gain(&scenario)?;
    let unit_markers = [VLine {
        x: unit_gain.band.tariff_lower,
        label: format!("band low {:.2}", unit_gain.band.tariff_lower),
    }];
    emit_report(
        &unit_gain.report,
        &args.out,
        args.format,
        Some(&acceptance_plot(&unit_markers)),
    )?;
    println!(
        "unit-gain variant band = [{:.4}, unbounded)",
        unit_gain.band.tariff_lower
    );

    emit_json_value(
        "mixed_band",
        &json!({
            "scenario_hash": scenario.hash,
            "band": run.band,
            "dominance_holds_inside_band": run.dominance_holds_inside_band,
            "unit_gain_band": unit_gain.band,
        }),
        &args.out,
    )?;

    if !run.dominance_holds_inside_band {
        return Err(CliError::Property(
            "subjective acceptance is not below the objective one inside the band".into(),
        ));
    }
    Ok(())
}

fn self_ref(args: CommonArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.scenario, Strictness::Strict)?;
    let runs = run_self_reference(&scenario)?;
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for run in &runs {
        emit_report(&run.self_report, &args.out, args.format, None)?;
        emit_report(&run.alternative_report, &args.out, args.format, None)?;
        println!(
            "{}: dominance = {}, min gap = {:.3e}, crossing gap = {:.3e}",
            run.distribution, run.dominance_holds, run.min_gap, run.crossing_gap
        );
        if !run.dominance_holds || run.crossing_gap >= 1e-6 {
            failures.push(run.distribution.clone());
        }
        summary.push(json!({
            "distribution": run.distribution,
            "dominance_holds": run.dominance_holds,
            "min_gap": run.min_gap,
            "crossing_gap": run.crossing_gap,
            "crossing_tariff_currency": run.crossing_tariff,
        }));
    }
    emit_json_value(
        "self_ref_summary",
        &json!({ "scenario_hash": scenario.hash, "runs": summary }),
        &args.out,
    )?;
    if !failures.is_empty() {
        return Err(CliError::Property(format!(
            "self-reference dominance violated for: {}",
            failures.join(", ")
        )));
    }
    Ok(())
}

fn check(args: CheckArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.scenario, Strictness::Diagnostic)?;
    let report = run_property_check(&scenario)?;
    for line in report.lines() {
        println!("{line}");
    }
    if let Some(out) = &args.out {
        let value = serde_json::to_value(&report)
            .map_err(|e| CliError::Config(format!("check report not serializable: {e}")))?;
        let path = emit_json_value("check", &value, out)?;
        println!("wrote {}", path.display());
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Property("one or more checks failed".into()))
    }
}
