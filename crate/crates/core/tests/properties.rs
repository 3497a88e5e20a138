mod common;

use common::{random_corpus, random_document, MentionConfig, SkeletonConfig};
use corefud_core::analysis::{p95, EntityFilter, StatsAccumulator};
use corefud_core::formats::{align_tokens, from_plaintext, to_plaintext, EditOp};
use corefud_core::Corpus;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut diag = row[0];
        row[0] = i;
        for j in 1..=b.len() {
            let next = (diag + usize::from(a[i - 1] != b[j - 1])).min(row[j] + 1).min(row[j - 1] + 1);
            diag = row[j];
            row[j] = next;
        }
    }
    row[b.len()]
}

fn tokens() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn banded_alignment_is_optimal(reference in tokens(), noisy in tokens()) {
        let (cost, ops) = align_tokens(&reference, &noisy, usize::MAX).unwrap();
        prop_assert_eq!(cost, levenshtein(&reference, &noisy));
        let count = |k: EditOp| ops.iter().filter(|&&o| o == k).count();
        prop_assert_eq!(count(EditOp::Match) + count(EditOp::Substitute) + count(EditOp::Insert), reference.len());
        prop_assert_eq!(count(EditOp::Match) + count(EditOp::Substitute) + count(EditOp::Delete), noisy.len());
        prop_assert_eq!(count(EditOp::Substitute) + count(EditOp::Insert) + count(EditOp::Delete), cost);
    }

    #[test]
    fn alignment_refuses_above_limit(reference in tokens(), noisy in tokens(), limit in 0usize..20) {
        let exact = levenshtein(&reference, &noisy);
        prop_assert_eq!(align_tokens(&reference, &noisy, limit).is_some(), exact <= limit);
    }

    #[test]
    fn p95_is_nearest_rank(values in prop::collection::vec(0u64..1000, 0..80)) {
        let n = values.len();
        let expected = values
            .iter()
            .copied()
            .filter(|&v| 100 * values.iter().filter(|&&x| x <= v).count() >= 95 * n)
            .min();
        prop_assert_eq!(p95(&values), expected);
    }

    #[test]
    fn plaintext_survives_rendering(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk = SkeletonConfig { empty_rate: 0.2, spaced_rate: 0.1, ..SkeletonConfig::default() };
        let doc = random_document(&mut rng, "p", &sk, &MentionConfig::default());
        let plain = to_plaintext(&doc).value;
        let line = plain.render();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(from_plaintext(&line).unwrap(), plain);
    }

    #[test]
    fn stats_merge_is_additive(seed in any::<u64>(), cut in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, 6, &SkeletonConfig::default(), &MentionConfig::default());
        let (a, b) = corpus.documents.split_at(cut);
        for filter in [EntityFilter::NonSingletons, EntityFilter::Singletons, EntityFilter::All] {
            let mut whole = StatsAccumulator::new(filter);
            whole.add_corpus(&corpus);
            let mut left = StatsAccumulator::new(filter);
            left.add_corpus(&Corpus { documents: a.to_vec() });
            let mut right = StatsAccumulator::new(filter);
            right.add_corpus(&Corpus { documents: b.to_vec() });
            left.merge(&right);
            prop_assert_eq!(left.finish(), whole.finish());
        }
    }
}
