//! Nearest-neighbour topic alignment under Jensen-Shannon distance.
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::lda::{TopicMatrix, TopicModel};
use crate::num::{sum_in_order, Scalar};

const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Which form of the Jensen-Shannon quantity to report. Both use base-2
/// logarithms, so values lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JsdMode {
    /// Square root of the divergence; a metric.
    #[default]
    Distance,
    Divergence,
}

fn check_distribution<T: Scalar>(name: &str, p: &[T]) -> Result<()> {
    let mut sum = 0.0;
    for (i, &x) in p.iter().enumerate() {
        let x = x.as_f64();
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("{name}[{i}] = {x}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("{name} sums to {sum}")));
    }
    Ok(())
}

/// Jensen-Shannon distance (base 2) between two probability vectors.
pub fn jsd<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    jsd_with(p, q, JsdMode::Distance)
}

pub fn jsd_with<T: Scalar>(p: &[T], q: &[T], mode: JsdMode) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution(format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    check_distribution("p", p)?;
    check_distribution("q", q)?;
    Ok(jsd_unchecked(p, q, mode))
}

#[inline]
fn half_kl_term<T: Scalar>(x: T, m: T) -> T {
    if x > T::zero() {
        x * (x / m).log2()
    } else {
        T::zero()
    }
}

/// Per-coordinate terms are formed as `f(p, m) + f(q, m)`, which is
/// commutative in floating point, and accumulated left to right; the result
/// is therefore exactly symmetric in its arguments.
pub(crate) fn jsd_unchecked<T: Scalar>(p: &[T], q: &[T], mode: JsdMode) -> T {
    let two = T::of(2.0);
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        let m = (a + b) / two;
        acc = acc + (half_kl_term(a, m) + half_kl_term(b, m));
    }
    let div = (acc / two).max(T::zero()).min(T::one());
    match mode {
        JsdMode::Distance => div.sqrt(),
        JsdMode::Divergence => div,
    }
}

/// Re-indexes both models' topic rows over the sorted union of their
/// vocabularies. Words missing from a model get probability zero; rows are
/// not renormalized.
pub fn project_to_union<T: Scalar>(
    m1: &TopicModel<T>,
    m2: &TopicModel<T>,
) -> (TopicMatrix<T>, TopicMatrix<T>, Vocabulary) {
    let union: BTreeSet<&str> = m1
        .vocabulary
        .words()
        .iter()
        .chain(m2.vocabulary.words())
        .map(String::as_str)
        .collect();
    let words: Vec<String> = union.into_iter().map(str::to_string).collect();
    let vocab = Vocabulary::from_words(words).expect("set elements are unique");
    let project = |m: &TopicModel<T>| {
        let cols: Vec<usize> = m
            .vocabulary
            .words()
            .iter()
            .map(|w| vocab.id(w).expect("word is in the union") as usize)
            .collect();
        let mut out = TopicMatrix::zeros(m.k(), vocab.len());
        for (t, row) in m.phi.iter_rows().enumerate() {
            let dst = out.row_mut(t);
            for (&c, &x) in cols.iter().zip(row) {
                dst[c] = x;
            }
        }
        out
    };
    (project(m1), project(m2), vocab)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedPair<T> {
    pub source_topic: usize,
    pub target_topic: usize,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult<T = f64> {
    /// One pair per source topic, in source order.
    pub pairs: Vec<AlignedPair<T>>,
    pub alignment_distance: T,
    pub topic_overlap: T,
    pub k1: usize,
    pub k2: usize,
    pub union_vocab_size: usize,
}

impl<T: Scalar> AlignmentResult<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "k1": self.k1,
            "k2": self.k2,
            "union_vocab_size": self.union_vocab_size,
            "alignment_distance": self.alignment_distance.as_f64(),
            "topic_overlap": self.topic_overlap.as_f64(),
            "pairs": self.pairs.iter().map(|p| json!({
                "source": p.source_topic,
                "target": p.target_topic,
                "distance": p.distance.as_f64(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// All source-by-target distances; row `i` holds source topic `i`.
pub fn distance_matrix<T: Scalar>(a: &TopicMatrix<T>, b: &TopicMatrix<T>, mode: JsdMode) -> Vec<Vec<T>> {
    (0..a.rows())
        .into_par_iter()
        .map(|i| {
            let p = a.row(i);
            (0..b.rows()).map(|j| jsd_unchecked(p, b.row(j), mode)).collect()
        })
        .collect()
}

pub fn align<T: Scalar>(m1: &TopicModel<T>, m2: &TopicModel<T>) -> Result<AlignmentResult<T>> {
    align_with(m1, m2, JsdMode::Distance)
}

/// Distances closer than this count as tied. Topics that are tied in real
/// arithmetic (two targets disjoint from the source, say) can land a few
/// ulps apart depending on summation order.
pub fn tie_tolerance<T: Scalar>() -> T {
    T::epsilon() * T::of(256.0)
}

/// Matches every topic of `m1` to its nearest topic of `m2` (many-to-one
/// allowed; ties within [`tie_tolerance`] go to the lowest target index).
pub fn align_with<T: Scalar>(
    m1: &TopicModel<T>,
    m2: &TopicModel<T>,
    mode: JsdMode,
) -> Result<AlignmentResult<T>> {
    if m1.k() == 0 || m2.k() == 0 {
        return Err(Error::Precondition("cannot align a model with no topics".into()));
    }
    for (name, m) in [("m1", m1), ("m2", m2)] {
        for (t, row) in m.phi.iter_rows().enumerate() {
            check_distribution(&format!("{name} topic {t}"), row)?;
        }
    }
    let (a, b, vocab) = project_to_union(m1, m2);
    let dist = distance_matrix(&a, &b, mode);
    let pairs: Vec<AlignedPair<T>> = dist
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let lo = row.iter().copied().fold(T::infinity(), T::min);
            let best = row
                .iter()
                .position(|&d| d <= lo + tie_tolerance::<T>())
                .expect("row has at least one target");
            AlignedPair {
                source_topic: i,
                target_topic: best,
                distance: row[best],
            }
        })
        .collect();
    let k2 = m2.k();
    Ok(AlignmentResult {
        alignment_distance: alignment_distance(&pairs),
        topic_overlap: topic_overlap(&pairs, k2),
        pairs,
        k1: m1.k(),
        k2,
        union_vocab_size: vocab.len(),
    })
}

/// Mean distance over the aligned pairs.
pub fn alignment_distance<T: Scalar>(pairs: &[AlignedPair<T>]) -> T {
    let ds: Vec<T> = pairs.iter().map(|p| p.distance).collect();
    sum_in_order(&ds) / T::of(pairs.len() as f64)
}

/// Fraction of the `k2` target topics chosen by at least one source.
pub fn topic_overlap<T: Scalar>(pairs: &[AlignedPair<T>], k2: usize) -> T {
    let distinct: BTreeSet<usize> = pairs.iter().map(|p| p.target_topic).collect();
    T::of(distinct.len() as f64) / T::of(k2 as f64)
}
