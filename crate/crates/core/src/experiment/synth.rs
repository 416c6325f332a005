//! Generative LDA corpora with known topics.
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::Gamma;

use crate::corpus::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::lda::TopicMatrix;
use crate::seed::{self, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub k_true: usize,
    pub vocab_size: usize,
    pub num_docs: usize,
    pub doc_length: usize,
    /// Symmetric Dirichlet concentration of document-topic mixtures.
    pub alpha_true: f64,
    /// Symmetric Dirichlet concentration of topic-word distributions.
    pub beta_concentration: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k_true", self.k_true),
            ("vocab_size", self.vocab_size),
            ("num_docs", self.num_docs),
            ("doc_length", self.doc_length),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.k_true > self.vocab_size {
            return Err(Error::InvalidConfig(format!(
                "k_true={} exceeds vocab_size={}",
                self.k_true, self.vocab_size
            )));
        }
        for (name, v) in [("alpha_true", self.alpha_true), ("beta_concentration", self.beta_concentration)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn dirichlet(rng: &mut SeededRng, concentration: f64, n: usize) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("concentration validated positive");
    let mut xs: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = xs.iter().sum();
    if sum > 0.0 {
        xs.iter_mut().for_each(|x| *x /= sum);
    } else {
        // every component underflowed; the limit of tiny concentration is a vertex
        let i = WeightedIndex::new(vec![1.0; n]).unwrap().sample(rng);
        xs.iter_mut().for_each(|x| *x = 0.0);
        xs[i] = 1.0;
    }
    xs
}

/// Draws `k_true` topics from Dirichlet(`beta_concentration`), then each
/// document's mixture from Dirichlet(`alpha_true`) and its tokens from the
/// mixture. Returns the corpus (vocabulary `w000..`, no frequency
/// filtering) and the true topic-word matrix, whose columns follow the
/// corpus vocabulary ids.
pub fn generate_synthetic_corpus(params: &SynthParams) -> Result<(Corpus, TopicMatrix<f64>)> {
    params.validate()?;
    let mut rng = seed::rng(params.seed);
    let v = params.vocab_size;

    let topics: Vec<Vec<f64>> = (0..params.k_true)
        .map(|_| dirichlet(&mut rng, params.beta_concentration, v))
        .collect();
    let word_pickers: Vec<WeightedIndex<f64>> = topics
        .iter()
        .map(|t| WeightedIndex::new(t).expect("topic has positive mass"))
        .collect();

    let vw = v.to_string().len().max(3);
    let words = (0..v).map(|i| format!("w{i:0vw$}")).collect();
    let vocabulary = Vocabulary::from_words(words)?;

    let dw = params.num_docs.to_string().len().max(4);
    let mut documents = Vec::with_capacity(params.num_docs);
    for d in 0..params.num_docs {
        let theta = dirichlet(&mut rng, params.alpha_true, params.k_true);
        let topic_picker = WeightedIndex::new(&theta).expect("mixture has positive mass");
        let tokens = (0..params.doc_length)
            .map(|_| {
                let t = topic_picker.sample(&mut rng);
                word_pickers[t].sample(&mut rng) as u32
            })
            .collect();
        documents.push(Document {
            doc_id: format!("doc{d:0dw$}"),
            tokens,
        });
    }
    let corpus = Corpus::from_parts(vocabulary, documents, 1)?;
    Ok((corpus, TopicMatrix::from_rows(topics)?))
}
