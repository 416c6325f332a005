use std::fmt::Write;

use super::csv::{fmt_sig12, SummaryRow};
use crate::experiment::StabilityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    AlignmentDistance,
    TopicOverlap,
}

impl Measure {
    pub fn file_name(self) -> &'static str {
        match self {
            Measure::AlignmentDistance => "alignment_distance.svg",
            Measure::TopicOverlap => "topic_overlap.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Measure::AlignmentDistance => "Alignment distance",
            Measure::TopicOverlap => "Topic overlap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XScale {
    #[default]
    Log2,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartOptions {
    pub x_scale: XScale,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn color(k: usize, series_index: usize) -> &'static str {
    const FALLBACK: [&str; 6] = ["#7f3c8d", "#11a579", "#3969ac", "#e73f74", "#80ba5a", "#e68310"];
    match k {
        20 => "#2ca02c",
        40 => "#1f77b4",
        60 => "#d62728",
        80 => "#e6c200",
        _ => FALLBACK[series_index % FALLBACK.len()],
    }
}

struct Point {
    size: usize,
    y: f64,
    sd: f64,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    scale: XScale,
}

impl Frame {
    fn xv(&self, size: f64) -> f64 {
        match self.scale {
            XScale::Log2 => size.log2(),
            XScale::Linear => size,
        }
    }

    fn px(&self, size: f64) -> f64 {
        let (lo, hi) = (self.xv(self.x_min), self.xv(self.x_max));
        let t = if hi > lo { (self.xv(size) - lo) / (hi - lo) } else { 0.5 };
        LEFT + t * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y_min, self.y_max);
        let t = (y - self.y_min) / (self.y_max - self.y_min);
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn parse(s: &str) -> f64 {
    s.parse().expect("summary values are rendered floats")
}

/// Renders a line-with-whisker chart of one measure. Points come from the
/// rendered `summary` values so the chart always agrees with summary.csv.
pub fn render_chart(report: &StabilityReport, summary: &[SummaryRow], measure: Measure, options: &ChartOptions) -> String {
    let mut series: Vec<(usize, Vec<Point>)> = Vec::new();
    for kr in &report.per_k {
        let mut pts: Vec<Point> = summary
            .iter()
            .filter(|r| r.k == kr.k)
            .map(|r| {
                let (y, sd) = match measure {
                    Measure::AlignmentDistance => (&r.distance_mean, &r.distance_sd),
                    Measure::TopicOverlap => (&r.overlap_mean, &r.overlap_sd),
                };
                Point { size: r.sample_size, y: parse(y), sd: parse(sd) }
            })
            .collect();
        pts.sort_by_key(|p| p.size);
        series.push((kr.k, pts));
    }

    let sizes: Vec<usize> = series.iter().flat_map(|(_, p)| p.iter().map(|p| p.size)).collect();
    let x_min = sizes.iter().copied().min().unwrap_or(1).max(1) as f64;
    let x_max = sizes.iter().copied().max().unwrap_or(1).max(1) as f64;
    let (y_min, y_max) = match measure {
        Measure::TopicOverlap => (0.0, 1.05),
        Measure::AlignmentDistance => {
            let top = series
                .iter()
                .flat_map(|(_, p)| p.iter().map(|p| p.y + p.sd))
                .chain(report.per_k.iter().map(|k| k.band.max.max(k.band.mean + k.band.sd)))
                .fold(0.0, f64::max);
            (0.0, ((top * 1.1 * 20.0).ceil() / 20.0).clamp(0.05, 1.05))
        }
    };
    let frame = Frame { x_min, x_max, y_min, y_max, scale: options.x_scale };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        measure.title()
    )
    .unwrap();
    writeln!(
        s,
        r#"<g class="plot" data-y-min="{}" data-y-max="{}" data-x-scale="{}">"#,
        fmt_sig12(y_min),
        fmt_sig12(y_max),
        match options.x_scale {
            XScale::Log2 => "log2",
            XScale::Linear => "linear",
        }
    )
    .unwrap();

    // axes
    let (x0, x1, yb, yt) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{yb:.2}" x2="{x1:.2}" y2="{yb:.2}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{yb:.2}" x2="{x0:.2}" y2="{yt:.2}" stroke="black"/>"#).unwrap();
    let mut ticks: Vec<usize> = sizes.clone();
    ticks.sort_unstable();
    ticks.dedup();
    for n in &ticks {
        let x = frame.px(*n as f64);
        writeln!(s, r#"<line x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#, yb + 18.0).unwrap();
    }
    for i in 0..=5 {
        let v = y_min + (y_max - y_min) * i as f64 / 5.0;
        let y = frame.py(v);
        writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#, x0 - 8.0, y + 4.0).unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">sample size (documents{})</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        if options.x_scale == XScale::Log2 { ", log2 scale" } else { "" }
    )
    .unwrap();

    if measure == Measure::AlignmentDistance {
        for (i, kr) in report.per_k.iter().enumerate() {
            let c = color(kr.k, i);
            let lo = frame.py(kr.band.mean - kr.band.sd);
            let hi = frame.py(kr.band.mean + kr.band.sd);
            writeln!(
                s,
                r#"<rect class="band" data-k="{}" x="{x0:.2}" y="{hi:.2}" width="{:.2}" height="{:.2}" fill="{c}" fill-opacity="0.12"/>"#,
                kr.k,
                x1 - x0,
                (lo - hi).max(0.0)
            )
            .unwrap();
        }
    }

    for (i, (k, pts)) in series.iter().enumerate() {
        let c = color(*k, i);
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", frame.px(p.size as f64), frame.py(p.y)))
            .collect();
        writeln!(
            s,
            r#"<polyline class="series" data-k="{k}" fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
        for p in pts {
            let x = frame.px(p.size as f64);
            writeln!(
                s,
                r#"<line class="whisker" data-k="{k}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/>"#,
                frame.py(p.y - p.sd),
                frame.py(p.y + p.sd)
            )
            .unwrap();
            writeln!(
                s,
                r#"<circle class="point" data-k="{k}" data-size="{}" cx="{x:.2}" cy="{:.2}" r="3.5" fill="{c}"/>"#,
                p.size,
                frame.py(p.y)
            )
            .unwrap();
        }
    }

    if measure == Measure::AlignmentDistance {
        for (i, kr) in report.per_k.iter().enumerate() {
            if let Some(n) = kr.minimum_stable_size {
                let x = frame.px(n as f64);
                writeln!(
                    s,
                    r#"<line class="stable-size" data-k="{}" x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{yt:.2}" stroke="{}" stroke-dasharray="6 4"/>"#,
                    kr.k,
                    color(kr.k, i)
                )
                .unwrap();
            }
        }
    }
    writeln!(s, "</g>").unwrap();

    for (i, kr) in report.per_k.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
            lx + 20.0,
            color(kr.k, i)
        )
        .unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}">k = {}</text>"#, lx + 26.0, y + 4.0, kr.k).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
