use rand::Rng;
use statrs::function::gamma::ln_gamma;

use super::{ModelConfig, TopicMatrix, TopicModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::seed;

/// Sufficient statistics of a collapsed Gibbs state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountState {
    k: usize,
    v: usize,
    doc_topic: Vec<u32>,
    topic_word: Vec<u32>,
    topic_total: Vec<u32>,
    assignments: Vec<Vec<u32>>,
}

impl CountState {
    /// Builds counts from explicit per-token topic assignments.
    pub fn from_assignments(corpus: &Corpus, k: usize, assignments: Vec<Vec<u32>>) -> Result<Self> {
        let docs = corpus.documents();
        if assignments.len() != docs.len() {
            return Err(Error::Precondition(format!(
                "{} assignment vectors for {} documents",
                assignments.len(),
                docs.len()
            )));
        }
        let v = corpus.vocabulary().len();
        let mut state = Self {
            k,
            v,
            doc_topic: vec![0; docs.len() * k],
            topic_word: vec![0; k * v],
            topic_total: vec![0; k],
            assignments: Vec::new(),
        };
        for (d, (doc, z)) in docs.iter().zip(&assignments).enumerate() {
            if z.len() != doc.tokens.len() {
                return Err(Error::Precondition(format!(
                    "document {d}: {} assignments for {} tokens",
                    z.len(),
                    doc.tokens.len()
                )));
            }
            for (&w, &t) in doc.tokens.iter().zip(z) {
                if t as usize >= k {
                    return Err(Error::Precondition(format!("topic {t} >= K={k}")));
                }
                state.add(d, w as usize, t as usize);
            }
        }
        state.assignments = assignments;
        Ok(state)
    }

    fn random(corpus: &Corpus, k: usize, rng: &mut seed::SeededRng) -> Self {
        let assignments: Vec<Vec<u32>> = corpus
            .documents()
            .iter()
            .map(|doc| doc.tokens.iter().map(|_| rng.random_range(0..k as u32)).collect())
            .collect();
        Self::from_assignments(corpus, k, assignments).expect("random assignments are well formed")
    }

    #[inline]
    fn add(&mut self, d: usize, w: usize, t: usize) {
        self.doc_topic[d * self.k + t] += 1;
        self.topic_word[t * self.v + w] += 1;
        self.topic_total[t] += 1;
    }

    #[inline]
    fn remove(&mut self, d: usize, w: usize, t: usize) {
        self.doc_topic[d * self.k + t] -= 1;
        self.topic_word[t * self.v + w] -= 1;
        self.topic_total[t] -= 1;
    }

    pub fn num_topics(&self) -> usize {
        self.k
    }

    pub fn vocab_size(&self) -> usize {
        self.v
    }

    pub fn num_docs(&self) -> usize {
        self.assignments.len()
    }

    pub fn doc_topic(&self, d: usize, t: usize) -> u32 {
        self.doc_topic[d * self.k + t]
    }

    pub fn topic_word(&self, t: usize, w: usize) -> u32 {
        self.topic_word[t * self.v + w]
    }

    pub fn topic_total(&self, t: usize) -> u32 {
        self.topic_total[t]
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.assignments
    }

    pub fn num_tokens(&self) -> usize {
        self.assignments.iter().map(Vec::len).sum()
    }

    /// Checks that every count table sums to the token count and that topic
    /// totals agree with the topic-word table.
    pub fn check_conservation(&self) -> Result<()> {
        let tokens = self.num_tokens() as u64;
        let sum = |xs: &[u32]| xs.iter().map(|&x| x as u64).sum::<u64>();
        let (dk, kw, k) = (sum(&self.doc_topic), sum(&self.topic_word), sum(&self.topic_total));
        if dk != tokens || kw != tokens || k != tokens {
            return Err(Error::Precondition(format!(
                "count conservation violated: tokens={tokens} n_dk={dk} n_kw={kw} n_k={k}"
            )));
        }
        for t in 0..self.k {
            let row = sum(&self.topic_word[t * self.v..(t + 1) * self.v]);
            if row != self.topic_total[t] as u64 {
                return Err(Error::Precondition(format!(
                    "topic {t}: n_k={} but row sum is {row}",
                    self.topic_total[t]
                )));
            }
        }
        Ok(())
    }

    /// Unnormalized conditional weights for a token of word `w` in document
    /// `d` whose own assignment has already been removed from the counts.
    #[inline]
    pub(crate) fn topic_weights(&self, d: usize, w: usize, alpha: f64, beta: f64, out: &mut [f64]) {
        let vbeta = self.v as f64 * beta;
        let dt = &self.doc_topic[d * self.k..(d + 1) * self.k];
        for t in 0..self.k {
            out[t] = (dt[t] as f64 + alpha) * (self.topic_word[t * self.v + w] as f64 + beta)
                / (self.topic_total[t] as f64 + vbeta);
        }
    }

    fn sweep(&mut self, corpus: &Corpus, alpha: f64, beta: f64, rng: &mut seed::SeededRng, weights: &mut [f64]) {
        for (d, doc) in corpus.documents().iter().enumerate() {
            for (i, &w) in doc.tokens.iter().enumerate() {
                let w = w as usize;
                let old = self.assignments[d][i] as usize;
                self.remove(d, w, old);
                self.topic_weights(d, w, alpha, beta, weights);
                let mut total = 0.0;
                for x in weights.iter_mut() {
                    total += *x;
                    *x = total;
                }
                let u = rng.random::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(self.k - 1);
                self.add(d, w, new);
                self.assignments[d][i] = new as u32;
            }
        }
    }

    fn phi<T: Scalar>(&self, beta: f64) -> TopicMatrix<T> {
        let vbeta = self.v as f64 * beta;
        let mut phi = TopicMatrix::zeros(self.k, self.v);
        for t in 0..self.k {
            let denom = self.topic_total[t] as f64 + vbeta;
            let row = phi.row_mut(t);
            for (w, x) in row.iter_mut().enumerate() {
                *x = T::of((self.topic_word[t * self.v + w] as f64 + beta) / denom);
            }
        }
        phi
    }
}

/// Collapsed joint log p(w, z) in nats, including the Dirichlet
/// normalizers.
pub fn log_likelihood(state: &CountState, config: &ModelConfig) -> f64 {
    let (k, v) = (state.k as f64, state.v as f64);
    let (alpha, beta) = (config.alpha, config.beta);

    let lg_beta = ln_gamma(beta);
    let mut ll = 0.0;
    for t in 0..state.k {
        ll += ln_gamma(v * beta) - ln_gamma(state.topic_total[t] as f64 + v * beta);
        for w in 0..state.v {
            let n = state.topic_word[t * state.v + w];
            if n > 0 {
                ll += ln_gamma(n as f64 + beta) - lg_beta;
            }
        }
    }
    let lg_alpha = ln_gamma(alpha);
    for d in 0..state.num_docs() {
        let len = state.assignments[d].len() as f64;
        ll += ln_gamma(k * alpha) - ln_gamma(len + k * alpha);
        for t in 0..state.k {
            let n = state.doc_topic[d * state.k + t];
            if n > 0 {
                ll += ln_gamma(n as f64 + alpha) - lg_alpha;
            }
        }
    }
    ll
}

pub fn train<T: Scalar>(corpus: &Corpus, config: &ModelConfig) -> Result<TopicModel<T>> {
    train_with_observer(corpus, config, |_, _| {})
}

/// Like [`train`], calling `observer(sweep, state)` after every sweep.
/// Sweeps are numbered from 1.
pub fn train_with_observer<T, F>(corpus: &Corpus, config: &ModelConfig, mut observer: F) -> Result<TopicModel<T>>
where
    T: Scalar,
    F: FnMut(usize, &CountState),
{
    config.validate()?;
    let tokens = corpus.num_tokens();
    if config.k > tokens {
        return Err(Error::TooManyTopics { k: config.k, tokens });
    }
    let mut rng = seed::rng(config.seed);
    let mut state = CountState::random(corpus, config.k, &mut rng);
    let mut weights = vec![0.0; config.k];
    for it in 1..=config.iterations {
        state.sweep(corpus, config.alpha, config.beta, &mut rng, &mut weights);
        debug_assert!(state.check_conservation().is_ok());
        observer(it, &state);
    }
    Ok(TopicModel {
        config: *config,
        vocabulary: corpus.vocabulary().clone(),
        phi: state.phi(config.beta),
        corpus_fingerprint: corpus.fingerprint().to_string(),
        final_log_likelihood: log_likelihood(&state, config),
    })
}
