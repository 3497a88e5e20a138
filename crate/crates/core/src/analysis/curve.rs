use alloc::string::String;
use alloc::vec::Vec;

use super::{entity_range, max_adjacent_gap, p95};
use crate::matching::TokenMismatch;
use crate::metrics::{score_document, ScoreConfig};
use crate::model::{document_word_index, Corpus};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RangeSortKey {
    #[default]
    P95,
    MaxAdjacentGap,
}

impl core::str::FromStr for RangeSortKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "p95" => Ok(RangeSortKey::P95),
            "max-gap" | "max_adjacent_gap" => Ok(RangeSortKey::MaxAdjacentGap),
            other => Err(alloc::format!("unknown sort key {other:?} (expected p95 or max-gap)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveConfig {
    pub window_tokens: u64,
    /// Only documents whose gold p95 range exceeds this take part.
    pub min_p95: u64,
    pub sort_key: RangeSortKey,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig { window_tokens: 50_000, min_p95: 100, sort_key: RangeSortKey::P95 }
    }
}

/// Gold range figures and the system score of one document.
#[derive(Clone, Debug, PartialEq)]
pub struct DocumentRange {
    pub doc_id: String,
    pub words: u64,
    pub p95_range: Option<u64>,
    pub max_adjacent_gap: Option<u64>,
    pub conll_f1: f64,
}

impl DocumentRange {
    fn key(&self, key: RangeSortKey) -> u64 {
        match key {
            RangeSortKey::P95 => self.p95_range.unwrap_or(0),
            RangeSortKey::MaxAdjacentGap => self.max_adjacent_gap.unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeCurvePoint {
    /// Mean gold p95 range of the window's documents.
    pub window_p95_range: f64,
    /// Unweighted mean of per-document CoNLL F1.
    pub mean_conll_f1: f64,
    pub window_tokens: u64,
    pub documents: usize,
}

/// Scores every document on its own and measures its gold entity ranges
/// (non-singleton entities only).
pub fn document_ranges(gold: &Corpus, pred: &Corpus, config: &ScoreConfig) -> Result<Vec<DocumentRange>, TokenMismatch> {
    if gold.documents.len() != pred.documents.len() {
        return Err(TokenMismatch {
            doc_id: String::new(),
            detail: alloc::format!("{} gold documents vs {} predicted", gold.documents.len(), pred.documents.len()),
        });
    }
    gold.documents
        .iter()
        .zip(&pred.documents)
        .map(|(g, p)| {
            let tally = score_document(g, p, config)?;
            let index = document_word_index(g);
            let entities = g.entities.iter().filter(|e| e.mentions.len() > 1);
            let ranges: Vec<u64> = entities.clone().map(|e| entity_range(e, 0, &index)).collect();
            Ok(DocumentRange {
                doc_id: g.doc_id.clone(),
                words: g.word_count() as u64,
                p95_range: p95(&ranges),
                max_adjacent_gap: entities.map(|e| max_adjacent_gap(e, 0, &index)).max(),
                conll_f1: tally.conll().f1,
            })
        })
        .collect()
}

/// Sorts qualifying documents by the range key and tiles them into
/// disjoint windows of at most `window_tokens` words, filled greedily. A
/// document longer than the window forms a window of its own.
pub fn long_range_curve(documents: &[DocumentRange], config: &CurveConfig) -> Vec<RangeCurvePoint> {
    let mut docs: Vec<&DocumentRange> =
        documents.iter().filter(|d| d.p95_range.is_some_and(|r| r > config.min_p95)).collect();
    docs.sort_by_key(|d| d.key(config.sort_key));
    let mut points = Vec::new();
    let mut window: Vec<&DocumentRange> = Vec::new();
    let mut tokens = 0u64;
    let close = |window: &mut Vec<&DocumentRange>, tokens: u64, points: &mut Vec<RangeCurvePoint>| {
        if window.is_empty() {
            return;
        }
        let n = window.len() as f64;
        points.push(RangeCurvePoint {
            window_p95_range: window.iter().map(|d| d.p95_range.unwrap_or(0) as f64).sum::<f64>() / n,
            mean_conll_f1: window.iter().map(|d| d.conll_f1).sum::<f64>() / n,
            window_tokens: tokens,
            documents: window.len(),
        });
        window.clear();
    };
    for d in docs {
        if !window.is_empty() && tokens + d.words > config.window_tokens {
            close(&mut window, tokens, &mut points);
            tokens = 0;
        }
        window.push(d);
        tokens += d.words;
    }
    close(&mut window, tokens, &mut points);
    points
}
