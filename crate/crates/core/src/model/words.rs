use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Corpus, NodeId};

/// Corpus-wide position of a node. Regular tokens get consecutive `word`
/// values starting at 1; an empty node shares the `word` of the closest
/// preceding regular token and is ordered after it by `minor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordOrdinal {
    pub word: u64,
    pub minor: u32,
}

/// Sentence offsets for O(1) ordinal lookup.
#[derive(Clone, Debug, Default)]
pub struct WordIndex {
    sentence_offsets: Vec<Vec<u64>>,
    total: u64,
}

impl WordIndex {
    pub fn ordinal(&self, document: usize, id: NodeId) -> WordOrdinal {
        let offset = self.sentence_offsets[document][id.sentence];
        WordOrdinal { word: offset + u64::from(id.major), minor: id.minor }
    }

    /// Number of regular tokens indexed.
    pub fn word_count(&self) -> u64 {
        self.total
    }

    /// Explicit per-document map over every node.
    pub fn to_map(&self, corpus: &Corpus) -> Vec<BTreeMap<NodeId, WordOrdinal>> {
        corpus
            .documents
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.sentences
                    .iter()
                    .flat_map(|s| s.nodes.iter().map(|n| (n.id, self.ordinal(d, n.id))))
                    .collect()
            })
            .collect()
    }
}

pub fn global_word_index(corpus: &Corpus) -> WordIndex {
    let mut total = 0u64;
    let sentence_offsets = corpus
        .documents
        .iter()
        .map(|doc| {
            doc.sentences
                .iter()
                .map(|s| {
                    let offset = total;
                    total += s.word_count() as u64;
                    offset
                })
                .collect()
        })
        .collect();
    WordIndex { sentence_offsets, total }
}

/// Index over a single document, addressed as document 0.
pub fn document_word_index(doc: &super::Document) -> WordIndex {
    let mut total = 0u64;
    let offsets = doc
        .sentences
        .iter()
        .map(|s| {
            let offset = total;
            total += s.word_count() as u64;
            offset
        })
        .collect();
    WordIndex { sentence_offsets: alloc::vec![offsets], total }
}
