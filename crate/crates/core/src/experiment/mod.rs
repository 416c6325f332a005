//! Spanning and sample model grids, pairwise alignment metrics, the
//! spanning band and the minimum stable sample size.
pub mod stats;
mod synth;

pub use synth::{generate_synthetic_corpus, SynthParams};

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::align;
use crate::corpus::{sample_corpus, Corpus};
use crate::error::{Error, Result};
use crate::lda::{train, ModelConfig, TopicModel};
use crate::seed::{derive_seed, SeedRole};

/// Trainer settings shared by every run of a plan; `K` and the seed vary
/// per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerTemplate {
    /// `None` means `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
}

impl Default for TrainerTemplate {
    fn default() -> Self {
        Self {
            alpha: None,
            beta: ModelConfig::DEFAULT_BETA,
            iterations: ModelConfig::DEFAULT_ITERATIONS,
        }
    }
}

impl TrainerTemplate {
    pub fn config(&self, k: usize, seed: u64) -> ModelConfig {
        ModelConfig {
            k,
            alpha: self.alpha.unwrap_or_else(|| ModelConfig::default_alpha(k)),
            beta: self.beta,
            iterations: self.iterations,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub k_values: Vec<usize>,
    pub spanning_count: usize,
    pub sample_sizes: Vec<usize>,
    pub replicates_per_size: usize,
    pub base_seed: u64,
    pub trainer: TrainerTemplate,
    /// Stability threshold is `band.mean + multiplier * band.sd`.
    pub stability_sd_multiplier: f64,
    /// Explicit spanning seeds, used for every `k` instead of derived ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spanning_seeds: Option<Vec<u64>>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            k_values: vec![20, 40, 60, 80],
            spanning_count: 5,
            sample_sizes: Vec::new(),
            replicates_per_size: 5,
            base_seed: 0,
            trainer: TrainerTemplate::default(),
            stability_sd_multiplier: 1.0,
            spanning_seeds: None,
        }
    }
}

impl ExperimentPlan {
    pub fn spanning_seed(&self, k: usize, index: usize) -> u64 {
        match &self.spanning_seeds {
            Some(seeds) => seeds[index],
            None => derive_seed(self.base_seed, SeedRole::Spanning, k, None, index),
        }
    }

    pub fn sample_draw_seed(&self, k: usize, size: usize, replicate: usize) -> u64 {
        derive_seed(self.base_seed, SeedRole::SampleDraw, k, Some(size), replicate)
    }

    pub fn sample_train_seed(&self, k: usize, size: usize, replicate: usize) -> u64 {
        derive_seed(self.base_seed, SeedRole::SampleTrain, k, Some(size), replicate)
    }

    /// Checks the plan against a corpus of `num_docs` documents.
    pub fn validate(&self, num_docs: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k_values.is_empty() {
            return bad("k_values is empty".into());
        }
        let mut ks = HashSet::new();
        for &k in &self.k_values {
            if !ks.insert(k) {
                return bad(format!("duplicate k value {k}"));
            }
            self.trainer.config(k, 0).validate()?;
        }
        if self.spanning_count < 2 {
            return bad(format!("spanning_count must be >= 2, got {}", self.spanning_count));
        }
        if self.replicates_per_size < 1 {
            return bad("replicates_per_size must be >= 1".into());
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sample_sizes must be strictly ascending".into());
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 1 || n > num_docs) {
            return bad(format!("sample size {n} outside 1..={num_docs}"));
        }
        if !(self.stability_sd_multiplier >= 0.0 && self.stability_sd_multiplier.is_finite()) {
            return bad("stability_sd_multiplier must be a non-negative number".into());
        }
        if let Some(seeds) = &self.spanning_seeds {
            if seeds.len() != self.spanning_count {
                return bad(format!(
                    "{} spanning_seeds for spanning_count {}",
                    seeds.len(),
                    self.spanning_count
                ));
            }
        }
        let mut seen = HashSet::new();
        for &k in &self.k_values {
            let mut check = |seed: u64, what: String| {
                if seen.insert((k, seed)) {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!("duplicate run seed {seed} ({what}, k={k})")))
                }
            };
            for i in 0..self.spanning_count {
                check(self.spanning_seed(k, i), format!("spanning model {i}"))?;
            }
            for &n in &self.sample_sizes {
                for r in 0..self.replicates_per_size {
                    check(self.sample_train_seed(k, n, r), format!("sample n={n} r={r}"))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComparisonKind {
    #[serde(rename = "spanning-vs-spanning")]
    SpanningVsSpanning,
    #[serde(rename = "sample-vs-spanning")]
    SampleVsSpanning,
}

impl ComparisonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComparisonKind::SpanningVsSpanning => "spanning-vs-spanning",
            ComparisonKind::SampleVsSpanning => "sample-vs-spanning",
        }
    }
}

impl fmt::Display for ComparisonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub k: usize,
    pub comparison_kind: ComparisonKind,
    /// Present iff `comparison_kind` is sample-vs-spanning.
    pub sample_size: Option<usize>,
    pub source_seed: u64,
    pub target_seed: u64,
    pub alignment_distance: f64,
    pub topic_overlap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanningBand {
    pub k: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl SpanningBand {
    pub fn threshold(&self, sd_multiplier: f64) -> f64 {
        self.mean + sd_multiplier * self.sd
    }
}

/// Per-size statistics over all replicate-by-spanning comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub sample_size: usize,
    pub comparisons: usize,
    pub distance_mean: f64,
    pub distance_sd: f64,
    pub overlap_mean: f64,
    pub overlap_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicCountReport {
    pub k: usize,
    pub band: SpanningBand,
    pub threshold: f64,
    pub sizes: Vec<SizeSummary>,
    pub minimum_stable_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub version: u32,
    pub corpus_fingerprint: String,
    pub plan: ExperimentPlan,
    pub per_k: Vec<TopicCountReport>,
    pub rows: Vec<MetricsRow>,
}

pub const REPORT_VERSION: u32 = 1;

fn tag_seed<T>(seed: u64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Run {
        seed,
        source: Box::new(e),
    })
}

/// Receives every trained model with a stable relative name such as
/// `k20/spanning_0.model`. Called from worker threads.
pub type ModelSink<'a> = &'a (dyn Fn(&str, &TopicModel) -> Result<()> + Sync);

/// Trains the spanning set for `k` and aligns every ordered pair of
/// distinct spanning models.
pub fn run_spanning(corpus: &Corpus, k: usize, plan: &ExperimentPlan) -> Result<(Vec<TopicModel>, Vec<MetricsRow>)> {
    run_spanning_with(corpus, k, plan, None)
}

fn run_spanning_with(
    corpus: &Corpus,
    k: usize,
    plan: &ExperimentPlan,
    sink: Option<ModelSink<'_>>,
) -> Result<(Vec<TopicModel>, Vec<MetricsRow>)> {
    plan.validate(corpus.num_docs())?;
    let seeds: Vec<u64> = (0..plan.spanning_count).map(|i| plan.spanning_seed(k, i)).collect();
    let models: Vec<Result<TopicModel>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let m = tag_seed(seed, train(corpus, &plan.trainer.config(k, seed)))?;
            if let Some(sink) = sink {
                sink(&format!("k{k}/spanning_{i}.model"), &m)?;
            }
            Ok(m)
        })
        .collect();
    let models = models.into_iter().collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|i| (0..models.len()).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| {
            let r = align(&models[i], &models[j])?;
            Ok(MetricsRow {
                k,
                comparison_kind: ComparisonKind::SpanningVsSpanning,
                sample_size: None,
                source_seed: seeds[i],
                target_seed: seeds[j],
                alignment_distance: r.alignment_distance,
                topic_overlap: r.topic_overlap,
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((models, rows))
}

/// Trains one model per (sample size, replicate) on a fresh random sample
/// and aligns it, as source, against every spanning model.
pub fn run_samples(
    corpus: &Corpus,
    k: usize,
    plan: &ExperimentPlan,
    spanning_models: &[TopicModel],
) -> Result<Vec<MetricsRow>> {
    run_samples_with(corpus, k, plan, spanning_models, None)
}

fn run_samples_with(
    corpus: &Corpus,
    k: usize,
    plan: &ExperimentPlan,
    spanning_models: &[TopicModel],
    sink: Option<ModelSink<'_>>,
) -> Result<Vec<MetricsRow>> {
    plan.validate(corpus.num_docs())?;
    if let Some(m) = spanning_models.iter().find(|m| m.corpus_fingerprint != corpus.fingerprint()) {
        return Err(Error::Precondition(format!(
            "spanning model (seed {}) was trained on corpus {} but the experiment corpus is {}",
            m.config.seed,
            m.corpus_fingerprint,
            corpus.fingerprint()
        )));
    }
    let cells: Vec<(usize, usize)> = plan
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..plan.replicates_per_size).map(move |r| (n, r)))
        .collect();
    let per_cell: Vec<Result<Vec<MetricsRow>>> = cells
        .par_iter()
        .map(|&(n, r)| {
            let train_seed = plan.sample_train_seed(k, n, r);
            let draw_seed = plan.sample_draw_seed(k, n, r);
            let sample = tag_seed(draw_seed, sample_corpus(corpus, n, draw_seed))?;
            let model = tag_seed(train_seed, train(&sample, &plan.trainer.config(k, train_seed)))?;
            if let Some(sink) = sink {
                sink(&format!("k{k}/sample_n{n}_r{r}.model"), &model)?;
            }
            spanning_models
                .iter()
                .map(|target| {
                    let a = align(&model, target)?;
                    Ok(MetricsRow {
                        k,
                        comparison_kind: ComparisonKind::SampleVsSpanning,
                        sample_size: Some(n),
                        source_seed: train_seed,
                        target_seed: target.config.seed,
                        alignment_distance: a.alignment_distance,
                        topic_overlap: a.topic_overlap,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(cells.len() * spanning_models.len());
    for cell in per_cell {
        rows.extend(cell?);
    }
    Ok(rows)
}

/// Mean, sample sd, min and max of spanning-pair alignment distances.
pub fn spanning_band(rows: &[MetricsRow]) -> Result<SpanningBand> {
    if rows.len() < 2 {
        return Err(Error::Precondition(format!(
            "spanning band needs at least 2 spanning rows, got {}",
            rows.len()
        )));
    }
    let k = rows[0].k;
    if let Some(r) = rows
        .iter()
        .find(|r| r.k != k || r.comparison_kind != ComparisonKind::SpanningVsSpanning)
    {
        return Err(Error::Precondition(format!(
            "spanning band rows must all be spanning-vs-spanning with k={k}; found {} with k={}",
            r.comparison_kind, r.k
        )));
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.alignment_distance).collect();
    Ok(SpanningBand {
        k,
        mean: stats::mean(&ds),
        sd: stats::sample_sd(&ds),
        min: ds.iter().copied().fold(f64::INFINITY, f64::min),
        max: ds.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        n: ds.len(),
    })
}

/// Smallest sample size whose mean alignment distance is at most
/// `band.mean + sd_multiplier * band.sd`.
pub fn min_stable_sample_size(
    size_means: &[(usize, f64)],
    band: &SpanningBand,
    sd_multiplier: f64,
) -> Result<Option<usize>> {
    if size_means.is_empty() {
        return Err(Error::Precondition("no per-size means given".into()));
    }
    if size_means.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Precondition("per-size means must be keyed by ascending size".into()));
    }
    let threshold = band.threshold(sd_multiplier);
    Ok(size_means.iter().find(|(_, m)| *m <= threshold).map(|(n, _)| *n))
}

/// Per-size summaries for one `k`, requiring exactly `expected` comparisons
/// per size.
pub fn summarize_sizes(rows: &[MetricsRow], k: usize, sizes: &[usize], expected: usize) -> Result<Vec<SizeSummary>> {
    let mut by_size: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows
        .iter()
        .filter(|r| r.k == k && r.comparison_kind == ComparisonKind::SampleVsSpanning)
    {
        let n = r.sample_size.expect("sample rows carry a size");
        let e = by_size.entry(n).or_default();
        e.0.push(r.alignment_distance);
        e.1.push(r.topic_overlap);
    }
    sizes
        .iter()
        .map(|&n| {
            let (d, o) = by_size.remove(&n).unwrap_or_default();
            if d.len() != expected {
                return Err(Error::Precondition(format!(
                    "k={k} size {n}: {} comparisons, expected {expected}",
                    d.len()
                )));
            }
            Ok(SizeSummary {
                sample_size: n,
                comparisons: d.len(),
                distance_mean: stats::mean(&d),
                distance_sd: stats::sample_sd(&d),
                overlap_mean: stats::mean(&o),
                overlap_sd: stats::sample_sd(&o),
            })
        })
        .collect()
}

/// Assembles the report for one `k` from its rows.
pub fn summarize_k(rows: &[MetricsRow], k: usize, plan: &ExperimentPlan) -> Result<TopicCountReport> {
    let spanning: Vec<MetricsRow> = rows
        .iter()
        .filter(|r| r.k == k && r.comparison_kind == ComparisonKind::SpanningVsSpanning)
        .cloned()
        .collect();
    let band = spanning_band(&spanning)?;
    let sizes = summarize_sizes(
        rows,
        k,
        &plan.sample_sizes,
        plan.replicates_per_size * plan.spanning_count,
    )?;
    let minimum_stable_size = if sizes.is_empty() {
        None
    } else {
        let means: Vec<(usize, f64)> = sizes.iter().map(|s| (s.sample_size, s.distance_mean)).collect();
        min_stable_sample_size(&means, &band, plan.stability_sd_multiplier)?
    };
    Ok(TopicCountReport {
        k,
        threshold: band.threshold(plan.stability_sd_multiplier),
        band,
        sizes,
        minimum_stable_size,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

/// Runs the whole plan. Rows come out in canonical order (k, kind, size,
/// replicate, target) whatever the degree of parallelism.
pub fn run_experiment(corpus: &Corpus, plan: &ExperimentPlan, options: RunOptions) -> Result<StabilityReport> {
    run_experiment_with_sink(corpus, plan, options, None)
}

pub fn run_experiment_with_sink(
    corpus: &Corpus,
    plan: &ExperimentPlan,
    options: RunOptions,
    sink: Option<ModelSink<'_>>,
) -> Result<StabilityReport> {
    plan.validate(corpus.num_docs())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = options.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut ks = plan.k_values.clone();
        ks.sort_unstable();
        let mut rows = Vec::new();
        let mut per_k = Vec::new();
        for k in ks {
            let (models, mut k_rows) = run_spanning_with(corpus, k, plan, sink)?;
            k_rows.extend(run_samples_with(corpus, k, plan, &models, sink)?);
            per_k.push(summarize_k(&k_rows, k, plan)?);
            rows.extend(k_rows);
        }
        Ok(StabilityReport {
            version: REPORT_VERSION,
            corpus_fingerprint: corpus.fingerprint().to_string(),
            plan: plan.clone(),
            per_k,
            rows,
        })
    })
}
