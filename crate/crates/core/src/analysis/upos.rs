use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::matching::TokenMismatch;
use crate::metrics::{score_corpus, ScoreConfig, PRF};
use crate::model::{Corpus, Document, Mention, Parent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorLevel {
    /// Keep whole entities with at least one mention carrying the tag.
    Entity,
    /// Keep only the mentions carrying the tag.
    Mention,
}

impl core::str::FromStr for FactorLevel {
    type Err = alloc::string::String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entity" => Ok(FactorLevel::Entity),
            "mention" => Ok(FactorLevel::Mention),
            other => Err(alloc::format!("unknown level {other:?} (expected entity or mention)")),
        }
    }
}

fn is_flat(deprel: Option<&str>) -> bool {
    deprel.is_some_and(|r| r == "flat" || r.starts_with("flat:"))
}

/// UPOS of the mention head together with the UPOS of its `flat` children.
pub fn head_tags<'a>(doc: &'a Document, mention: &Mention) -> BTreeSet<&'a str> {
    let mut tags = BTreeSet::new();
    let h = mention.head;
    let Some(sentence) = doc.sentences.get(h.sentence) else { return tags };
    let Some(head) = sentence.node(h.major, h.minor) else { return tags };
    tags.insert(head.upos.as_str());
    for node in &sentence.nodes {
        let child = matches!(node.head, Some(Parent::Node(p)) if p.major == h.major && p.minor == h.minor);
        if child && is_flat(node.deprel.as_deref()) {
            tags.insert(node.upos.as_str());
        }
    }
    tags
}

/// The document restricted to the entities or mentions carrying `tag`.
/// At mention level, entities left with a single mention are dropped.
pub fn filter_by_upos(doc: &Document, tag: &str, level: FactorLevel) -> Document {
    let mut out = doc.clone();
    let has = |m: &Mention| head_tags(doc, m).contains(tag);
    out.entities = doc
        .entities
        .iter()
        .filter_map(|e| match level {
            FactorLevel::Entity => e.mentions.iter().any(has).then(|| e.clone()),
            FactorLevel::Mention => {
                let mut e = e.clone();
                e.mentions.retain(has);
                (e.mentions.len() > 1).then_some(e)
            }
        })
        .collect();
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorizedScore {
    pub conll: PRF,
    /// No mention with the tag survived on either side.
    pub degenerate: bool,
}

/// CoNLL score of one dataset after filtering both sides by head UPOS.
pub fn upos_factorized_score(
    gold: &Corpus,
    pred: &Corpus,
    tag: &str,
    level: FactorLevel,
    config: &ScoreConfig,
) -> Result<FactorizedScore, TokenMismatch> {
    let filter = |c: &Corpus| Corpus {
        documents: c.documents.iter().map(|d| filter_by_upos(d, tag, level)).collect::<Vec<_>>(),
    };
    let (g, p) = (filter(gold), filter(pred));
    let empty = |c: &Corpus| c.documents.iter().all(|d| d.entities.is_empty());
    let degenerate = empty(&g) && empty(&p);
    let score = score_corpus(&g, &p, config)?;
    Ok(FactorizedScore { conll: if degenerate { PRF::ZERO } else { score.total.conll() }, degenerate })
}
