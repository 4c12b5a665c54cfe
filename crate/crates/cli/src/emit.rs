//! Report emission: CSV rows, JSON with metadata, or an SVG plot.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::CliError;
use crate::report::ExperimentReport;
use crate::svg::{self, CurveSpec, PlotSpec, VLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

/// Which report columns an SVG plot shows.
#[derive(Debug, Clone)]
pub struct PlotColumns {
    pub y_label: String,
    /// `(column, label, color)` per curve.
    pub curves: Vec<(Column, String, &'static str)>,
    pub vlines: Vec<VLine>,
}

#[derive(Debug, Clone, Copy)]
pub enum Column {
    ObjectiveAcceptance,
    SubjectiveAcceptance,
    RelativeAttractiveness,
}

impl Column {
    fn pick(&self, row: &crate::report::ReportRow) -> f64 {
        match self {
            Column::ObjectiveAcceptance => row.objective_acceptance,
            Column::SubjectiveAcceptance => row.subjective_acceptance,
            Column::RelativeAttractiveness => row.relative_attractiveness,
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes the report in the chosen format; returns the emitted path.
pub fn emit_report(
    report: &ExperimentReport,
    dir: &Path,
    format: OutputFormat,
    plot: Option<&PlotColumns>,
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{}.{}", report.name, extension(format)));
    let payload = match format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json()?,
        OutputFormat::Svg => {
            let columns = plot.cloned().unwrap_or_else(|| acceptance_plot(&[]));
            render_plot(report, &columns)
        }
    };
    fs::write(&path, payload).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
        OutputFormat::Svg => "svg",
    }
}

fn render_plot(report: &ExperimentReport, columns: &PlotColumns) -> String {
    let curves = columns
        .curves
        .iter()
        .map(|(column, label, color)| CurveSpec {
            label: label.clone(),
            color,
            points: report
                .rows
                .iter()
                .map(|row| (row.tariff, column.pick(row)))
                .collect(),
        })
        .collect();
    svg::render(&PlotSpec {
        title: report.name.clone(),
        x_label: "tariff [currency]".into(),
        y_label: columns.y_label.clone(),
        curves,
        vlines: columns.vlines.clone(),
    })
}

/// Subjective vs objective acceptance, with optional vertical markers.
pub fn acceptance_plot(vlines: &[VLine]) -> PlotColumns {
    PlotColumns {
        y_label: "acceptance probability".into(),
        curves: vec![
            (
                Column::ObjectiveAcceptance,
                "objective".into(),
                svg::ORANGE,
            ),
            (
                Column::SubjectiveAcceptance,
                "subjective".into(),
                svg::BLUE,
            ),
        ],
        vlines: vlines.to_vec(),
    }
}

/// Relative attractiveness alone.
pub fn attractiveness_plot() -> PlotColumns {
    PlotColumns {
        y_label: "relative attractiveness".into(),
        curves: vec![(
            Column::RelativeAttractiveness,
            "relative attractiveness".into(),
            svg::GREEN,
        )],
        vlines: Vec::new(),
    }
}

/// Writes a JSON value next to the reports.
pub fn emit_json_value(
    name: &str,
    value: &serde_json::Value,
    dir: &Path,
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{name}.json"));
    let payload = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("value not serializable: {e}")))?;
    fs::write(&path, payload).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{ReportMetadata, ReportRow};

    fn probe_report() -> ExperimentReport {
        let rows = (0..5)
            .map(|i| ReportRow {
                tariff: i as f64,
                objective_utility: -3.0 - i as f64 * 0.1,
                subjective_utility: -0.1,
                alternative_objective_utility: -5.17,
                alternative_subjective_utility: 0.5 * i as f64,
                objective_acceptance: 0.9 - 0.1 * i as f64,
                subjective_acceptance: 0.8 - 0.1 * i as f64,
                relative_attractiveness: 0.05,
            })
            .collect();
        ExperimentReport {
            name: "probe".into(),
            metadata: ReportMetadata::new("probe", "hash", serde_json::Value::Null),
            rows,
        }
    }

    #[test]
    fn emits_all_three_formats() {
        let dir = tempfile::tempdir().unwrap();
        let report = probe_report();
        for format in [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg] {
            let path = emit_report(
                &report,
                dir.path(),
                format,
                Some(&acceptance_plot(&[])),
            )
            .unwrap();
            assert!(path.exists());
            let body = std::fs::read_to_string(&path).unwrap();
            assert!(!body.is_empty());
        }
        let json = std::fs::read_to_string(dir.path().join("probe.json")).unwrap();
        assert!(json.contains("scenario_hash"));
        assert!(json.contains("tool_version"));
        let svg = std::fs::read_to_string(dir.path().join("probe.svg")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn unwritable_directory_reports_the_path() {
        let report = probe_report();
        let err = emit_report(
            &report,
            Path::new("/proc/nonexistent/subdir"),
            OutputFormat::Csv,
            None,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("/proc/nonexistent"));
    }
}
