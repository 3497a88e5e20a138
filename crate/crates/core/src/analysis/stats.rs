use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{entity_range, p95};
use crate::model::{document_word_index, Corpus, Document, Entity, Mention, NodeId, Parent};

/// Which entities a statistics table covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EntityFilter {
    #[default]
    NonSingletons,
    Singletons,
    All,
}

impl EntityFilter {
    pub fn keeps(self, entity: &Entity) -> bool {
        match self {
            EntityFilter::NonSingletons => entity.mentions.len() > 1,
            EntityFilter::Singletons => entity.mentions.len() == 1,
            EntityFilter::All => !entity.mentions.is_empty(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EntityStats {
    pub total: u64,
    pub per_1k_words: f64,
    /// In mentions.
    pub max_length: u64,
    pub avg_length: f64,
    /// Over the covered non-singleton entities; `None` when there are none.
    pub p95_range: Option<u64>,
    /// Entities with 1, 2, 3, 4 and 5+ mentions.
    pub length_histogram: [u64; 5],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MentionStats {
    pub total: u64,
    pub per_1k_words: f64,
    /// In words; empty nodes do not count.
    pub max_length: u64,
    pub avg_length: f64,
    /// Mentions with 0, 1, 2, 3, 4 and 5+ words.
    pub length_histogram: [u64; 6],
    pub pct_with_empty: f64,
    pub pct_with_gap: f64,
    pub pct_non_treelet: f64,
    /// Head UPOS → percentage of mentions.
    pub head_upos_distribution: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusStats {
    pub docs: u64,
    pub sentences: u64,
    pub words: u64,
    pub empty_nodes: u64,
    pub entities: EntityStats,
    pub mentions: MentionStats,
}

/// Raw, mergeable counts behind [`CorpusStats`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsAccumulator {
    pub filter: EntityFilter,
    docs: u64,
    sentences: u64,
    words: u64,
    empty_nodes: u64,
    entities: u64,
    entity_mentions: u64,
    entity_max: u64,
    entity_histogram: [u64; 5],
    ranges: Vec<u64>,
    mentions: u64,
    mention_words: u64,
    mention_max: u64,
    mention_histogram: [u64; 6],
    with_empty: u64,
    with_gap: u64,
    non_treelet: u64,
    head_upos: BTreeMap<String, u64>,
}

/// True when the regular words of the span are not consecutive.
pub(crate) fn has_gap(m: &Mention) -> bool {
    let mut words = m.span.iter().filter(|n| !n.is_empty());
    let Some(mut prev) = words.next().copied() else { return false };
    for &n in words {
        if n.sentence != prev.sentence || n.major != prev.major + 1 {
            return true;
        }
        prev = n;
    }
    false
}

/// True when more than one span node attaches outside the span, i.e. the
/// span is not a connected subgraph of the tree.
pub(crate) fn is_non_treelet(doc: &Document, m: &Mention) -> bool {
    let roots = m
        .span
        .iter()
        .filter(|&&id| match doc.node(id).and_then(|n| n.parent()) {
            Some(Parent::Node(p)) => !m.contains(NodeId::new(id.sentence, p.major, p.minor)),
            _ => true,
        })
        .count();
    roots > 1
}

impl StatsAccumulator {
    pub fn new(filter: EntityFilter) -> Self {
        StatsAccumulator { filter, ..Default::default() }
    }

    pub fn add_document(&mut self, doc: &Document) {
        self.docs += 1;
        self.sentences += doc.sentences.len() as u64;
        self.words += doc.word_count() as u64;
        self.empty_nodes += doc.empty_count() as u64;
        let index = document_word_index(doc);
        for entity in doc.entities.iter().filter(|e| self.filter.keeps(e)) {
            let n = entity.mentions.len() as u64;
            self.entities += 1;
            self.entity_mentions += n;
            self.entity_max = self.entity_max.max(n);
            self.entity_histogram[(n.clamp(1, 5) - 1) as usize] += 1;
            if n > 1 {
                self.ranges.push(entity_range(entity, 0, &index));
            }
            for m in &entity.mentions {
                let len = m.word_len() as u64;
                self.mentions += 1;
                self.mention_words += len;
                self.mention_max = self.mention_max.max(len);
                self.mention_histogram[len.min(5) as usize] += 1;
                self.with_empty += m.span.iter().any(NodeId::is_empty) as u64;
                self.with_gap += has_gap(m) as u64;
                self.non_treelet += is_non_treelet(doc, m) as u64;
                let upos = doc.node(m.head).map(|n| n.upos.clone()).unwrap_or_else(|| String::from("_"));
                *self.head_upos.entry(upos).or_default() += 1;
            }
        }
    }

    pub fn add_corpus(&mut self, corpus: &Corpus) {
        for doc in &corpus.documents {
            self.add_document(doc);
        }
    }

    pub fn merge(&mut self, o: &StatsAccumulator) {
        self.docs += o.docs;
        self.sentences += o.sentences;
        self.words += o.words;
        self.empty_nodes += o.empty_nodes;
        self.entities += o.entities;
        self.entity_mentions += o.entity_mentions;
        self.entity_max = self.entity_max.max(o.entity_max);
        for (a, b) in self.entity_histogram.iter_mut().zip(o.entity_histogram) {
            *a += b;
        }
        self.ranges.extend_from_slice(&o.ranges);
        self.mentions += o.mentions;
        self.mention_words += o.mention_words;
        self.mention_max = self.mention_max.max(o.mention_max);
        for (a, b) in self.mention_histogram.iter_mut().zip(o.mention_histogram) {
            *a += b;
        }
        self.with_empty += o.with_empty;
        self.with_gap += o.with_gap;
        self.non_treelet += o.non_treelet;
        for (tag, n) in &o.head_upos {
            *self.head_upos.entry(tag.clone()).or_default() += n;
        }
    }

    pub fn finish(&self) -> CorpusStats {
        let per_1k = |n: u64| if self.words == 0 { 0.0 } else { 1000.0 * n as f64 / self.words as f64 };
        let avg = |sum: u64, n: u64| if n == 0 { 0.0 } else { sum as f64 / n as f64 };
        let pct = |k: u64| 100.0 * avg(k, self.mentions);
        CorpusStats {
            docs: self.docs,
            sentences: self.sentences,
            words: self.words,
            empty_nodes: self.empty_nodes,
            entities: EntityStats {
                total: self.entities,
                per_1k_words: per_1k(self.entities),
                max_length: self.entity_max,
                avg_length: avg(self.entity_mentions, self.entities),
                p95_range: p95(&self.ranges),
                length_histogram: self.entity_histogram,
            },
            mentions: MentionStats {
                total: self.mentions,
                per_1k_words: per_1k(self.mentions),
                max_length: self.mention_max,
                avg_length: avg(self.mention_words, self.mentions),
                length_histogram: self.mention_histogram,
                pct_with_empty: pct(self.with_empty),
                pct_with_gap: pct(self.with_gap),
                pct_non_treelet: pct(self.non_treelet),
                head_upos_distribution: self.head_upos.iter().map(|(t, &n)| (t.clone(), pct(n))).collect(),
            },
        }
    }
}

impl CorpusStats {
    pub fn of(corpus: &Corpus, filter: EntityFilter) -> CorpusStats {
        let mut acc = StatsAccumulator::new(filter);
        acc.add_corpus(corpus);
        acc.finish()
    }
}
