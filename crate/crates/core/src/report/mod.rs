//! CSV tables and SVG charts for a [`StabilityReport`].
mod csv;
mod svg;

pub use self::csv::{fmt_sig12, metrics_csv, summary_csv, summary_rows, SummaryRow};
pub use self::svg::{render_chart, ChartOptions, Measure, XScale};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{StabilityReport, REPORT_VERSION};

pub const METRICS_CSV: &str = "metrics.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_JSON: &str = "report.json";

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_report_json(report: &StabilityReport, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    write_file(path, &text)
}

pub fn read_report_json(path: &Path) -> Result<StabilityReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: StabilityReport =
        serde_json::from_str(&text).map_err(|e| Error::format("report", e.to_string()))?;
    if report.version != REPORT_VERSION {
        return Err(Error::Version {
            found: report.version,
            expected: REPORT_VERSION,
        });
    }
    if report.per_k.is_empty() {
        return Err(Error::format("per_k", "report has no topic counts"));
    }
    Ok(report)
}

/// Writes `metrics.csv` and `summary.csv` into `outdir`.
pub fn emit_csv(report: &StabilityReport, outdir: &Path) -> Result<()> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    write_file(&outdir.join(METRICS_CSV), &metrics_csv(report))?;
    write_file(&outdir.join(SUMMARY_CSV), &summary_csv(&summary_rows(report)))
}

/// Writes one SVG per measure into `outdir`.
pub fn emit_charts(report: &StabilityReport, outdir: &Path, options: &ChartOptions) -> Result<()> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let rows = summary_rows(report);
    for measure in [Measure::AlignmentDistance, Measure::TopicOverlap] {
        let svg = render_chart(report, &rows, measure, options);
        write_file(&outdir.join(measure.file_name()), &svg)?;
    }
    Ok(())
}

pub fn emit_all(report: &StabilityReport, outdir: &Path, options: &ChartOptions) -> Result<()> {
    emit_csv(report, outdir)?;
    emit_charts(report, outdir, options)
}
