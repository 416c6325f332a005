#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use topicstab::corpus::{Corpus, Document, Vocabulary};
use topicstab::lda::{ModelConfig, TopicMatrix};
use topicstab::TopicModel;

/// Jensen-Shannon distance by direct summation of the two KL terms with
/// natural logs converted to base 2.
pub fn jsd_oracle(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let kl = |x: &[f64]| -> f64 {
        x.iter()
            .zip(&m)
            .filter(|(xi, _)| **xi > 0.0)
            .map(|(xi, mi)| xi * (xi / mi).ln())
            .sum::<f64>()
            / std::f64::consts::LN_2
    };
    (0.5 * kl(p) + 0.5 * kl(q)).max(0.0).sqrt()
}

/// Random point on the simplex; with `sparse`, about a third of the entries
/// are exactly zero (at least one stays positive).
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize, sparse: bool) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.random_bool(1.0 / 3.0) {
                0.0
            } else {
                -rng.random::<f64>().max(1e-300).ln()
            }
        })
        .collect();
    if xs.iter().all(|&x| x == 0.0) {
        xs[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = xs.iter().sum();
    xs.iter_mut().for_each(|x| *x /= s);
    xs
}

pub fn model_from_rows(words: Vec<String>, rows: Vec<Vec<f64>>) -> TopicModel {
    let k = rows.len();
    TopicModel {
        config: ModelConfig::new(k.max(2), 0),
        vocabulary: Vocabulary::from_words(words).unwrap(),
        phi: TopicMatrix::from_rows(rows).unwrap(),
        corpus_fingerprint: "test".into(),
        final_log_likelihood: 0.0,
    }
}

/// Model with `k` random topics over `v` words drawn from a shared pool,
/// so two such models usually have overlapping but unequal vocabularies.
pub fn random_model(rng: &mut ChaCha8Rng, k: usize, v: usize, pool: usize) -> TopicModel {
    let mut ids: Vec<usize> = (0..pool).collect();
    for i in 0..v {
        let j = rng.random_range(i..pool);
        ids.swap(i, j);
    }
    let words = ids[..v].iter().map(|i| format!("t{i:02}")).collect();
    let rows = (0..k)
        .map(|_| {
            let sparse = rng.random_bool(0.3);
            random_simplex(rng, v, sparse)
        })
        .collect();
    model_from_rows(words, rows)
}

/// Topic rows keyed by word, for oracle code that must not share the
/// implementation's union projection.
pub fn rows_by_word(m: &TopicModel) -> Vec<HashMap<String, f64>> {
    m.phi
        .iter_rows()
        .map(|row| {
            m.vocabulary
                .words()
                .iter()
                .cloned()
                .zip(row.iter().copied())
                .collect()
        })
        .collect()
}

/// 50 documents over {a,b,c} and 50 over {x,y,z}, 100 tokens each.
pub fn separable_corpus() -> Corpus {
    let words: Vec<String> = ["a", "b", "c", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let vocab = Vocabulary::from_words(words).unwrap();
    let docs = (0..100)
        .map(|d| {
            let base = if d < 50 { 0 } else { 3 };
            Document {
                doc_id: format!("doc{d:03}"),
                tokens: (0..100).map(|i| base + ((i * 7 + d) % 3) as u32).collect(),
            }
        })
        .collect();
    Corpus::from_parts(vocab, docs, 1).unwrap()
}

pub fn separable_config(seed: u64) -> ModelConfig {
    ModelConfig::new(2, seed).with_alpha(25.0).with_beta(0.01).with_iterations(200)
}

/// Mass each topic puts on {a,b,c} (the rest is on {x,y,z}).
pub fn first_triple_mass(m: &TopicModel) -> Vec<f64> {
    m.phi
        .iter_rows()
        .map(|row| {
            ["a", "b", "c"]
                .iter()
                .map(|w| row[m.vocabulary.id(w).unwrap() as usize])
                .sum()
        })
        .collect()
}

/// Same tie gap as the library: exact ties in real arithmetic can differ by
/// a few ulps once summed.
pub const TIE_TOLERANCE: f64 = 256.0 * f64::EPSILON;

/// Brute-force alignment: dense vectors over the word union built from
/// hash maps, every pair scored by the oracle distance, lowest index among
/// the targets tied at the minimum.
pub fn brute_force_alignment(m1: &TopicModel, m2: &TopicModel) -> Vec<(usize, f64)> {
    let words: BTreeSet<String> = m1
        .vocabulary
        .words()
        .iter()
        .chain(m2.vocabulary.words())
        .cloned()
        .collect();
    let dense = |m: &TopicModel| -> Vec<Vec<f64>> {
        rows_by_word(m)
            .iter()
            .map(|row| words.iter().map(|w| row.get(w).copied().unwrap_or(0.0)).collect())
            .collect()
    };
    let (a, b) = (dense(m1), dense(m2));
    a.iter()
        .map(|p| {
            let ds: Vec<f64> = b.iter().map(|q| jsd_oracle(p, q)).collect();
            let lo = ds.iter().copied().fold(f64::INFINITY, f64::min);
            let j = ds.iter().position(|&d| d <= lo + TIE_TOLERANCE).unwrap();
            (j, ds[j])
        })
        .collect()
}
