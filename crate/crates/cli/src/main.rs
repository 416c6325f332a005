use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use topicstab::align::{align_with, JsdMode};
use topicstab::corpus::{
    build_corpus_with_diagnostics, read_corpus, read_raw_documents, sample_corpus_with_diagnostics,
    write_corpus, TokenizerConfig,
};
use topicstab::experiment::{
    generate_synthetic_corpus, run_experiment_with_sink, ExperimentPlan, RunOptions, SynthParams,
};
use topicstab::lda::{load_model, save_model, train, ModelConfig};
use topicstab::report::{emit_all, read_report_json, write_report_json, ChartOptions, XScale, REPORT_JSON};
use topicstab::TopicModel;

#[derive(Parser)]
#[command(name = "topicstab", version, about = "Topic model sampling stability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or subsample corpus files
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Train an LDA model by collapsed Gibbs sampling
    Train(TrainArgs),
    /// Align two models by Jensen-Shannon distance
    Align(AlignArgs),
    /// Run stability experiments or generate synthetic corpora
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Render CSV tables and SVG charts from a report.json
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Tokenize a directory of text files or a JSON-lines file
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long = "min-token-len", default_value_t = 2)]
        min_token_len: usize,
        #[arg(long = "min-freq", default_value_t = 2)]
        min_freq: usize,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
    /// Draw a seeded random document sample
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    /// Defaults to 50/K
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = ModelConfig::DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = ModelConfig::DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    m1: PathBuf,
    #[arg(long)]
    m2: PathBuf,
    /// Report the Jensen-Shannon divergence instead of its square root
    #[arg(long)]
    divergence: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run a full plan: spanning models, sample grid, metrics and report
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Skip writing trained models
        #[arg(long)]
        no_models: bool,
        #[arg(long)]
        linear_x: bool,
    },
    /// Generate a synthetic LDA corpus with known topics
    Synth {
        #[arg(long = "k-true")]
        k_true: usize,
        #[arg(long)]
        vocab: usize,
        #[arg(long)]
        docs: usize,
        #[arg(long)]
        doclen: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "beta-conc")]
        beta_conc: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        outdir: PathBuf,
    },
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    outdir: PathBuf,
    /// Linear instead of log2 sample-size axis
    #[arg(long)]
    linear_x: bool,
}

fn chart_options(linear_x: bool) -> ChartOptions {
    ChartOptions {
        x_scale: if linear_x { XScale::Linear } else { XScale::Log2 },
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn corpus_command(cmd: CorpusCommand) -> Result<()> {
    match cmd {
        CorpusCommand::Build { input, output, min_token_len, min_freq, stoplist } => {
            let mut config = TokenizerConfig {
                min_token_length: min_token_len,
                min_corpus_frequency: min_freq,
                ..Default::default()
            };
            if let Some(path) = stoplist {
                config.stoplist = TokenizerConfig::load_stoplist(&path)?;
            }
            let raw = read_raw_documents(&input)?;
            let (corpus, diag) = build_corpus_with_diagnostics(raw, &config)?;
            write_corpus(&corpus, &output)?;
            eprintln!(
                "built corpus: D={} V={} tokens={} (dropped {} empty documents, {} rare word types)",
                corpus.num_docs(),
                corpus.vocabulary().len(),
                corpus.num_tokens(),
                diag.dropped_documents,
                diag.dropped_word_types
            );
        }
        CorpusCommand::Sample { input, n, seed, output } => {
            let corpus = read_corpus(&input)?;
            let (sample, diag) = sample_corpus_with_diagnostics(&corpus, n, seed)?;
            write_corpus(&sample, &output)?;
            eprintln!(
                "sampled {} of {} documents: V={} (dropped {} emptied documents)",
                sample.num_docs(),
                corpus.num_docs(),
                sample.vocabulary().len(),
                diag.dropped_documents
            );
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Corpus(cmd) => corpus_command(cmd)?,
        Command::Train(a) => {
            let corpus = read_corpus(&a.corpus)?;
            let mut config = ModelConfig::new(a.k, a.seed).with_beta(a.beta).with_iterations(a.iters);
            if let Some(alpha) = a.alpha {
                config = config.with_alpha(alpha);
            }
            let model: TopicModel = train(&corpus, &config)?;
            save_model(&model, &a.output)?;
            eprintln!("trained K={} on D={}; final log likelihood {}", a.k, corpus.num_docs(), model.final_log_likelihood);
        }
        Command::Align(a) => {
            let m1: TopicModel = load_model(&a.m1)?;
            let m2: TopicModel = load_model(&a.m2)?;
            let mode = if a.divergence { JsdMode::Divergence } else { JsdMode::Distance };
            let result = align_with(&m1, &m2, mode)?;
            let mut text = serde_json::to_string_pretty(&result.to_json())?;
            text.push('\n');
            fs::write(&a.output, text).with_context(|| format!("writing {}", a.output.display()))?;
            eprintln!(
                "alignment distance {} topic overlap {}",
                result.alignment_distance, result.topic_overlap
            );
        }
        Command::Experiment(ExperimentCommand::Run { corpus, plan, outdir, threads, no_models, linear_x }) => {
            let corpus = read_corpus(&corpus)?;
            let plan_text = fs::read_to_string(&plan).with_context(|| format!("reading {}", plan.display()))?;
            let plan: ExperimentPlan =
                serde_json::from_str(&plan_text).with_context(|| format!("parsing plan {}", plan.display()))?;
            if plan.sample_sizes.is_empty() {
                bail!("plan has no sample_sizes");
            }
            create_dir(&outdir)?;
            let models_dir = outdir.join("models");
            let sink = |name: &str, m: &TopicModel| -> topicstab::Result<()> {
                let path = models_dir.join(name);
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent).map_err(|e| topicstab::Error::Io { path: parent.into(), source: e })?;
                }
                save_model(m, &path)
            };
            let report = run_experiment_with_sink(
                &corpus,
                &plan,
                RunOptions { threads },
                if no_models { None } else { Some(&sink) },
            )?;
            write_report_json(&report, &outdir.join(REPORT_JSON))?;
            emit_all(&report, &outdir, &chart_options(linear_x))?;
            for kr in &report.per_k {
                eprintln!(
                    "k={}: spanning band mean {:.4} sd {:.4}; minimum stable sample size {}",
                    kr.k,
                    kr.band.mean,
                    kr.band.sd,
                    kr.minimum_stable_size.map_or("none".to_string(), |n| n.to_string())
                );
            }
        }
        Command::Experiment(ExperimentCommand::Synth {
            k_true, vocab, docs, doclen, alpha, beta_conc, seed, outdir,
        }) => {
            let params = SynthParams {
                k_true,
                vocab_size: vocab,
                num_docs: docs,
                doc_length: doclen,
                alpha_true: alpha,
                beta_concentration: beta_conc,
                seed,
            };
            let (corpus, phi) = generate_synthetic_corpus(&params)?;
            create_dir(&outdir)?;
            write_corpus(&corpus, &outdir.join("corpus.jsonl"))?;
            let truth = TopicModel {
                config: ModelConfig { k: k_true, alpha, beta: beta_conc, iterations: 0, seed },
                vocabulary: corpus.vocabulary().clone(),
                phi,
                corpus_fingerprint: corpus.fingerprint().to_string(),
                final_log_likelihood: 0.0,
            };
            save_model(&truth, &outdir.join("true_phi.model"))?;
            eprintln!("wrote synthetic corpus D={docs} V={vocab} and {k_true} true topics to {}", outdir.display());
        }
        Command::Report(a) => {
            let report = read_report_json(&a.input)?;
            emit_all(&report, &a.outdir, &chart_options(a.linear_x))?;
        }
    }
    Ok(())
}
