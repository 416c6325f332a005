use std::fmt::Write;

use crate::experiment::StabilityReport;

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// One line of `summary.csv`, already rendered to text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub k: usize,
    pub sample_size: usize,
    pub comparisons: usize,
    pub distance_mean: String,
    pub distance_sd: String,
    pub overlap_mean: String,
    pub overlap_sd: String,
}

pub fn summary_rows(report: &StabilityReport) -> Vec<SummaryRow> {
    report
        .per_k
        .iter()
        .flat_map(|kr| {
            kr.sizes.iter().map(move |s| SummaryRow {
                k: kr.k,
                sample_size: s.sample_size,
                comparisons: s.comparisons,
                distance_mean: fmt_sig12(s.distance_mean),
                distance_sd: fmt_sig12(s.distance_sd),
                overlap_mean: fmt_sig12(s.overlap_mean),
                overlap_sd: fmt_sig12(s.overlap_sd),
            })
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "k,sample_size,comparisons,alignment_distance_mean,alignment_distance_sd,topic_overlap_mean,topic_overlap_sd\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k, r.sample_size, r.comparisons, r.distance_mean, r.distance_sd, r.overlap_mean, r.overlap_sd
        )
        .unwrap();
    }
    out
}

pub fn metrics_csv(report: &StabilityReport) -> String {
    let mut out = String::from(
        "k,comparison_kind,sample_size,source_seed,target_seed,alignment_distance,topic_overlap\n",
    );
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k,
            r.comparison_kind,
            r.sample_size.map(|n| n.to_string()).unwrap_or_default(),
            r.source_seed,
            r.target_seed,
            fmt_sig12(r.alignment_distance),
            fmt_sig12(r.topic_overlap),
        )
        .unwrap();
    }
    out
}
