//! Corpus statistics, entity ranges, UPOS-factorized scores, long-range
//! performance curves and capped split sampling.

mod curve;
mod sample;
mod stats;
mod upos;

use alloc::vec::Vec;

use crate::model::{Entity, WordIndex};

pub use curve::{document_ranges, long_range_curve, CurveConfig, DocumentRange, RangeCurvePoint, RangeSortKey};
pub use sample::{sample_split, Sampled, DEFAULT_CAP_WORDS};
pub use stats::{CorpusStats, EntityFilter, EntityStats, MentionStats, StatsAccumulator};
pub use upos::{filter_by_upos, head_tags, upos_factorized_score, FactorLevel, FactorizedScore};

/// Datasets whose p95 entity range exceeds this count as long-entity.
pub const LONG_ENTITY_P95: u64 = 1500;

/// Words between the first and the last mention head. Heads on empty nodes
/// use the ordinal of the word they follow.
pub fn entity_range(entity: &Entity, document: usize, index: &WordIndex) -> u64 {
    let mut heads = entity.mentions.iter().map(|m| index.ordinal(document, m.head).word);
    let Some(first) = heads.next() else { return 0 };
    let (lo, hi) = heads.fold((first, first), |(lo, hi), w| (lo.min(w), hi.max(w)));
    hi - lo
}

/// Largest distance between consecutive mention heads of the entity.
pub fn max_adjacent_gap(entity: &Entity, document: usize, index: &WordIndex) -> u64 {
    let mut heads: Vec<u64> = entity.mentions.iter().map(|m| index.ordinal(document, m.head).word).collect();
    heads.sort_unstable();
    heads.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
}

/// Nearest-rank 95th percentile: the value at 1-based rank `ceil(0.95 n)`
/// of the ascending order. `None` for an empty input.
pub fn p95(values: &[u64]) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = (95 * sorted.len()).div_ceil(100);
    Some(sorted[rank.max(1) - 1])
}

/// p95 over the ranges of non-singleton entities.
pub fn p95_range<'a, I>(entities: I, document: usize, index: &WordIndex) -> Option<u64>
where
    I: IntoIterator<Item = &'a Entity>,
{
    let ranges: Vec<u64> =
        entities.into_iter().filter(|e| e.mentions.len() > 1).map(|e| entity_range(e, document, index)).collect();
    p95(&ranges)
}

pub fn is_long_entity(p95_range: Option<u64>) -> bool {
    p95_range.is_some_and(|r| r > LONG_ENTITY_P95)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let values: Vec<u64> = (1..=20).map(|i| 10 * i).collect();
        assert_eq!(p95(&values), Some(190));
        assert_eq!(p95(&[7]), Some(7));
        assert_eq!(p95(&[]), None);
        let hundred: Vec<u64> = (1..=100).collect();
        assert_eq!(p95(&hundred), Some(95));
        assert_eq!(p95(&[3, 1, 2]), Some(3));
    }

    #[test]
    fn long_entity_threshold() {
        assert!(!is_long_entity(Some(1500)));
        assert!(is_long_entity(Some(1501)));
        assert!(!is_long_entity(None));
    }
}
