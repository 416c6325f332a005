//! Latent Dirichlet allocation trained by collapsed Gibbs sampling.
mod gibbs;
mod io;

pub use gibbs::{log_likelihood, train, train_with_observer, CountState};
pub use io::{load_model, read_model_from, save_model, write_model_to, MODEL_FILE_VERSION};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub k: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    /// Number of full Gibbs sweeps.
    pub iterations: usize,
    pub seed: u64,
}

impl ModelConfig {
    pub const DEFAULT_BETA: f64 = 0.01;
    pub const DEFAULT_ITERATIONS: usize = 500;

    /// `alpha = 50/K`, `beta = 0.01`, 500 sweeps.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            alpha: Self::default_alpha(k),
            beta: Self::DEFAULT_BETA,
            iterations: Self::DEFAULT_ITERATIONS,
            seed,
        }
    }

    pub fn default_alpha(k: usize) -> f64 {
        50.0 / k.max(1) as f64
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!("K must be >= 2, got {}", self.k)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Dense row-major matrix whose rows are probability distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> TopicMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::format(
                format!("row {i}"),
                format!("expected {cols} columns, found {}", r.len()),
            ));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    /// New matrix whose row `i` is row `order[i]` of `self`.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(order.len() * self.cols);
        for &r in order {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: order.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn cast<U: Scalar>(&self) -> TopicMatrix<U> {
        TopicMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| U::of(x.as_f64())).collect(),
        }
    }
}

/// A trained (or loaded) topic model: the K x V topic-word matrix plus the
/// settings and corpus it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel<T = f64> {
    pub config: ModelConfig,
    pub vocabulary: Vocabulary,
    pub phi: TopicMatrix<T>,
    pub corpus_fingerprint: String,
    pub final_log_likelihood: f64,
}

impl<T: Scalar> TopicModel<T> {
    pub fn k(&self) -> usize {
        self.phi.rows()
    }

    pub fn vocab_size(&self) -> usize {
        self.phi.cols()
    }

    /// The same model with topics relabeled: topic `i` of the result is
    /// topic `order[i]` of `self`.
    pub fn permute_topics(&self, order: &[usize]) -> Self {
        Self {
            phi: self.phi.select_rows(order),
            ..self.clone()
        }
    }

    /// Most probable words of a topic, highest first. Ties keep vocabulary
    /// order.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<(&str, T)> {
        let row = self.phi.row(topic);
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap_or(std::cmp::Ordering::Equal));
        idx.into_iter()
            .take(n)
            .map(|i| (self.vocabulary.words()[i].as_str(), row[i]))
            .collect()
    }
}
