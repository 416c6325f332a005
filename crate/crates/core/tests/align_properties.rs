mod common;

use std::collections::BTreeSet;

use common::{brute_force_alignment, random_model, TIE_TOLERANCE};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topicstab::align::{align, distance_matrix, project_to_union, JsdMode};
use topicstab::TopicModel;

#[test]
fn matches_brute_force_on_small_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let m1 = random_model(&mut rng, 4, 6, 6);
        let m2 = random_model(&mut rng, 3, 6, 6);
        let r = align(&m1, &m2).unwrap();
        let bf = brute_force_alignment(&m1, &m2);
        for (pair, (t, d)) in r.pairs.iter().zip(&bf) {
            assert_eq!(pair.target_topic, *t);
            assert!((pair.distance - d).abs() < 1e-12);
        }
        let distinct: BTreeSet<usize> = bf.iter().map(|(t, _)| *t).collect();
        assert!((r.topic_overlap - distinct.len() as f64 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn direction_matters() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut differs = false;
    for _ in 0..50 {
        let m1 = random_model(&mut rng, 2, 8, 10);
        let m2 = random_model(&mut rng, 6, 8, 10);
        let ab = align(&m1, &m2).unwrap();
        let ba = align(&m2, &m1).unwrap();
        assert_eq!(ab.pairs.len(), 2);
        assert_eq!(ba.pairs.len(), 6);
        differs |= ab.alignment_distance != ba.alignment_distance;
    }
    assert!(differs);
}

/// True when some source topic has two targets tied at its minimum
/// distance. Lowest-index tie-breaking then depends on target labels.
fn has_tied_minimum(m1: &TopicModel, m2: &TopicModel) -> bool {
    let (a, b, _) = project_to_union(m1, m2);
    distance_matrix(&a, &b, JsdMode::Distance).iter().any(|row| {
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        row.iter().filter(|&&d| d <= lo + TIE_TOLERANCE).count() > 1
    })
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_and_label_invariance(seed in any::<u64>(), k1 in 1usize..7, k2 in 1usize..7, v in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m1 = random_model(&mut rng, k1, v, 24);
        let m2 = random_model(&mut rng, k2, v, 24);
        let r = align(&m1, &m2).unwrap();

        prop_assert_eq!(r.pairs.len(), k1);
        let ds: Vec<f64> = r.pairs.iter().map(|p| p.distance).collect();
        let lo = ds.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo - 1e-15 <= r.alignment_distance && r.alignment_distance <= hi + 1e-15);
        prop_assert!(ds.iter().all(|d| d.is_finite() && (0.0..=1.0).contains(d)));
        let o = r.topic_overlap;
        prop_assert!(o >= 1.0 / k2 as f64 - 1e-15);
        prop_assert!(o <= (k1 as f64 / k2 as f64).min(1.0) + 1e-15);

        // relabel the targets: indices follow, measures do not change
        let order = shuffled(&mut rng, k2);
        let r2 = align(&m1, &m2.permute_topics(&order)).unwrap();
        let tied = has_tied_minimum(&m1, &m2);
        if tied {
            // tied targets may swap, moving distances by a few ulps
            prop_assert!((r2.alignment_distance - r.alignment_distance).abs() <= TIE_TOLERANCE);
        } else {
            prop_assert_eq!(r2.alignment_distance, r.alignment_distance);
            prop_assert_eq!(r2.topic_overlap, r.topic_overlap);
            for (a, b) in r.pairs.iter().zip(&r2.pairs) {
                prop_assert_eq!(b.distance, a.distance);
                prop_assert_eq!(order[b.target_topic], a.target_topic);
            }
        }

        // relabel the sources: pairs are reordered only
        let order = shuffled(&mut rng, k1);
        let r3 = align(&m1.permute_topics(&order), &m2).unwrap();
        prop_assert!((r3.alignment_distance - r.alignment_distance).abs() < 1e-15);
        prop_assert_eq!(r3.topic_overlap, r.topic_overlap);
        for (i, p) in r3.pairs.iter().enumerate() {
            prop_assert_eq!(p.target_topic, r.pairs[order[i]].target_topic);
            prop_assert_eq!(p.distance, r.pairs[order[i]].distance);
        }
    }
}
