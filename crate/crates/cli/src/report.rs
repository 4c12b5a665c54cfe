//! Experiment reports: one row per grid tariff with the objective and
//! subjective utilities and acceptance probabilities of both options.

use serde::Serialize;

use smods_cpt::{AcceptanceCurve64, Reference64};

use crate::error::CliError;

/// Column order is the emission order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportRow {
    pub tariff: f64,
    pub objective_utility: f64,
    pub subjective_utility: f64,
    pub alternative_objective_utility: f64,
    pub alternative_subjective_utility: f64,
    pub objective_acceptance: f64,
    pub subjective_acceptance: f64,
    pub relative_attractiveness: f64,
}

pub const CSV_HEADER: &str = "tariff,objective_utility,subjective_utility,\
alternative_objective_utility,alternative_subjective_utility,objective_acceptance,\
subjective_acceptance,relative_attractiveness";

impl ReportRow {
    pub fn compute(
        curve: &AcceptanceCurve64,
        tariff: f64,
        reference: &Reference64,
    ) -> Result<Self, CliError> {
        let objective_utility = curve.objective_utility(tariff);
        let subjective_utility = curve.subjective_utility(tariff, reference)?;
        let alternative_objective_utility = curve.alternative_objective();
        let alternative_subjective_utility = curve.alternative_subjective(tariff, reference);
        let objective_acceptance = curve.objective_acceptance(tariff);
        let subjective_acceptance = curve.subjective_acceptance(tariff, reference)?;
        let relative_attractiveness = (objective_utility - alternative_objective_utility)
            - (subjective_utility - alternative_subjective_utility);
        Ok(Self {
            tariff,
            objective_utility,
            subjective_utility,
            alternative_objective_utility,
            alternative_subjective_utility,
            objective_acceptance,
            subjective_acceptance,
            relative_attractiveness,
        })
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.tariff,
            self.objective_utility,
            self.subjective_utility,
            self.alternative_objective_utility,
            self.alternative_subjective_utility,
            self.objective_acceptance,
            self.subjective_acceptance,
            self.relative_attractiveness
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub experiment: String,
    pub scenario_hash: String,
    pub tool_version: String,
    pub config: serde_json::Value,
}

impl ReportMetadata {
    pub fn new(experiment: &str, scenario_hash: &str, config: serde_json::Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            scenario_hash: scenario_hash.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    /// File stem for emission.
    pub name: String,
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Evaluates one curve over a tariff grid under a fixed reference.
    pub fn over_grid(
        name: &str,
        metadata: ReportMetadata,
        curve: &AcceptanceCurve64,
        reference: &Reference64,
        tariffs: &[f64],
    ) -> Result<Self, CliError> {
        let rows = tariffs
            .iter()
            .map(|&tariff| ReportRow::compute(curve, tariff, reference))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            name: name.to_string(),
            metadata,
            rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("report not serializable: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Scenario, Strictness};
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
    fn relative_attractiveness_sign_matches_probability_ordering() {
        let scenario = scenario();
        let curve = scenario.curve().unwrap();
        let tariffs = scenario.grid.points();
        let report = ExperimentReport::over_grid(
            "probe",
            ReportMetadata::new("probe", &scenario.hash, serde_json::Value::Null),
            &curve,
            &scenario.reference,
            &tariffs,
        )
        .unwrap();
        for row in &report.rows {
            if row.relative_attractiveness > 1e-9 {
                assert!(row.objective_acceptance > row.subjective_acceptance);
            } else if row.relative_attractiveness < -1e-9 {
                assert!(row.objective_acceptance < row.subjective_acceptance);
            }
        }
    }

    #[test]
    fn csv_has_one_line_per_row_plus_header() {
        let scenario = scenario();
        let curve = scenario.curve().unwrap();
        let tariffs = crate::scenario::linspace(0.0, 30.0, 100);
        let report = ExperimentReport::over_grid(
            "probe",
            ReportMetadata::new("probe", &scenario.hash, serde_json::Value::Null),
            &curve,
            &scenario.reference,
            &tariffs,
        )
        .unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 101);
        assert!(csv.starts_with("tariff,"));
    }

    #[test]
    fn identical_runs_emit_identical_bytes() {
        let scenario = scenario();
        let run = || {
            let curve = scenario.curve().unwrap();
            let tariffs = scenario.grid.points();
            ExperimentReport::over_grid(
                "probe",
                ReportMetadata::new("probe", &scenario.hash, serde_json::Value::Null),
                &curve,
                &scenario.reference,
                &tariffs,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
