use std::fs;

use topicstab::experiment::{
    ComparisonKind, ExperimentPlan, MetricsRow, SizeSummary, SpanningBand, StabilityReport,
    TopicCountReport, REPORT_VERSION,
};
use topicstab::report::{
    emit_all, emit_charts, emit_csv, read_report_json, render_chart, summary_rows, write_report_json,
    ChartOptions, Measure, XScale,
};

fn size(n: usize, d: f64, o: f64) -> SizeSummary {
    SizeSummary {
        sample_size: n,
        comparisons: 4,
        distance_mean: d,
        distance_sd: 0.01,
        overlap_mean: o,
        overlap_sd: 0.05,
    }
}

fn k_report(k: usize, stable: Option<usize>) -> TopicCountReport {
    let band = SpanningBand { k, mean: 0.2, sd: 0.02, min: 0.18, max: 0.23, n: 2 };
    TopicCountReport {
        k,
        threshold: band.threshold(1.0),
        band,
        sizes: vec![size(100, 0.4, 0.7), size(200, 0.21, 0.95)],
        minimum_stable_size: stable,
    }
}

fn report(per_k: Vec<TopicCountReport>) -> StabilityReport {
    let rows = per_k
        .iter()
        .flat_map(|kr| {
            let k = kr.k;
            [
                MetricsRow {
                    k,
                    comparison_kind: ComparisonKind::SpanningVsSpanning,
                    sample_size: None,
                    source_seed: 1,
                    target_seed: 2,
                    alignment_distance: 0.2,
                    topic_overlap: 1.0,
                },
                MetricsRow {
                    k,
                    comparison_kind: ComparisonKind::SampleVsSpanning,
                    sample_size: Some(100),
                    source_seed: 3,
                    target_seed: 1,
                    alignment_distance: 1.0 / 3.0,
                    topic_overlap: 0.75,
                },
            ]
        })
        .collect();
    StabilityReport {
        version: REPORT_VERSION,
        corpus_fingerprint: "abc".into(),
        plan: ExperimentPlan {
            k_values: per_k.iter().map(|k| k.k).collect(),
            spanning_count: 2,
            sample_sizes: vec![100, 200],
            replicates_per_size: 2,
            ..Default::default()
        },
        per_k,
        rows,
    }
}

#[test]
fn summary_has_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(vec![k_report(20, Some(200))]);
    emit_csv(&r, dir.path()).unwrap();
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "k,sample_size,comparisons,alignment_distance_mean,alignment_distance_sd,topic_overlap_mean,topic_overlap_sd"
    );
    assert_eq!(lines[1], "20,100,4,0.4,0.01,0.7,0.05");

    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(
        lines[0],
        "k,comparison_kind,sample_size,source_seed,target_seed,alignment_distance,topic_overlap"
    );
    assert_eq!(lines[1], "20,spanning-vs-spanning,,1,2,0.2,1");
    assert_eq!(lines[2], "20,sample-vs-spanning,100,3,1,0.333333333333,0.75");
}

#[test]
fn emission_is_byte_identical() {
    let r = report(vec![k_report(20, Some(200)), k_report(40, None)]);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    emit_all(&r, a.path(), &ChartOptions::default()).unwrap();
    emit_all(&r, b.path(), &ChartOptions::default()).unwrap();
    for f in ["metrics.csv", "summary.csv", "alignment_distance.svg", "topic_overlap.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let r = report(vec![k_report(20, Some(200))]);
    write_report_json(&r, &path).unwrap();
    assert_eq!(read_report_json(&path).unwrap(), r);
    let tampered = fs::read_to_string(&path).unwrap().replacen("\"version\": 1", "\"version\": 7", 1);
    fs::write(&path, tampered).unwrap();
    assert!(matches!(read_report_json(&path), Err(topicstab::Error::Version { found: 7, .. })));
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

#[test]
fn dashed_line_per_stable_k() {
    let r = report(vec![k_report(20, Some(200)), k_report(40, None), k_report(60, Some(100))]);
    let rows = summary_rows(&r);
    let svg = render_chart(&r, &rows, Measure::AlignmentDistance, &ChartOptions::default());
    assert_eq!(count(&svg, "class=\"stable-size\""), 2);
    assert_eq!(count(&svg, "stroke-dasharray"), 2);
    assert_eq!(count(&svg, "class=\"stable-size\" data-k=\"20\""), 1);
    assert_eq!(count(&svg, "class=\"stable-size\" data-k=\"60\""), 1);
    assert_eq!(count(&svg, "class=\"band\""), 3);
    // figure colours for k = 20/40/60
    for c in ["#2ca02c", "#1f77b4", "#d62728"] {
        assert!(svg.contains(c));
    }
    let overlap = render_chart(&r, &rows, Measure::TopicOverlap, &ChartOptions::default());
    assert_eq!(count(&overlap, "stable-size"), 0);
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!("{name}=\"");
    let start = tag.find(&key).unwrap() + key.len();
    let end = start + tag[start..].find('"').unwrap();
    tag[start..end].parse().unwrap()
}

#[test]
fn overlap_axis_stays_within_unit_range() {
    let r = report(vec![k_report(20, None)]);
    let svg = render_chart(&r, &summary_rows(&r), Measure::TopicOverlap, &ChartOptions::default());
    let plot = svg.lines().find(|l| l.contains("class=\"plot\"")).unwrap();
    assert!(attr(plot, "data-y-min") >= 0.0);
    assert!(attr(plot, "data-y-max") <= 1.05);
}

#[test]
fn points_follow_summary_values() {
    let r = report(vec![k_report(20, Some(200))]);
    let svg = render_chart(&r, &summary_rows(&r), Measure::AlignmentDistance, &ChartOptions { x_scale: XScale::Linear });
    let pts: Vec<(f64, f64)> = svg
        .lines()
        .filter(|l| l.contains("class=\"point\""))
        .map(|l| (attr(l, "cx"), attr(l, "cy")))
        .collect();
    assert_eq!(pts.len(), 2);
    // distance 0.4 -> 0.21 means the second point sits lower (larger y)
    assert!(pts[0].0 < pts[1].0);
    assert!(pts[0].1 < pts[1].1);
    assert!(svg.contains("data-x-scale=\"linear\""));
}

#[test]
fn charts_are_written_per_measure() {
    let dir = tempfile::tempdir().unwrap();
    emit_charts(&report(vec![k_report(80, None)]), dir.path(), &ChartOptions::default()).unwrap();
    let svg = fs::read_to_string(dir.path().join("alignment_distance.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("#e6c200"));
    assert!(dir.path().join("topic_overlap.svg").exists());
}
