//! Mention-oriented scores: MOR, MD-h and the anaphor-decomposable zero
//! score.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::Counts;
use crate::matching::MentionAlignment;
use crate::model::{Entity, Mention, NodeId};

/// Flattened mentions of one document side with their entity membership.
#[derive(Clone, Debug, Default)]
pub struct MentionTable<'a> {
    pub mentions: Vec<&'a Mention>,
    pub entity_of: Vec<usize>,
    /// Mention indices per entity.
    pub clusters: Vec<Vec<usize>>,
}

impl<'a> MentionTable<'a> {
    pub fn new<I>(entities: I) -> Self
    where
        I: IntoIterator<Item = &'a Entity>,
    {
        let mut table = MentionTable::default();
        for (e, entity) in entities.into_iter().enumerate() {
            let mut cluster = Vec::with_capacity(entity.mentions.len());
            for m in &entity.mentions {
                cluster.push(table.mentions.len());
                table.mentions.push(m);
                table.entity_of.push(e);
            }
            table.clusters.push(cluster);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }
}

fn words(m: &Mention) -> impl Iterator<Item = NodeId> + '_ {
    m.span.iter().copied().filter(|n| !n.is_empty())
}

/// Mention overlap ratio: each aligned pair contributes
/// `|words ∩| / |words ∪|` (two aligned pure zeros contribute 1).
pub fn mor_counts(gold: &MentionTable<'_>, pred: &MentionTable<'_>, alignment: &MentionAlignment) -> Counts {
    let mut overlap = 0.0;
    for &(g, p) in &alignment.pairs {
        let (gm, pm) = (gold.mentions[g], pred.mentions[p]);
        let gw: Vec<NodeId> = words(gm).collect();
        let pw: Vec<NodeId> = words(pm).collect();
        let inter = gw.iter().filter(|n| pw.binary_search(n).is_ok()).count();
        let union = gw.len() + pw.len() - inter;
        overlap += if union == 0 { 1.0 } else { inter as f64 / union as f64 };
    }
    Counts {
        recall_num: overlap,
        recall_den: gold.len() as f64,
        precision_num: overlap,
        precision_den: pred.len() as f64,
    }
}

/// Mention detection on heads: multiset overlap of head node ids.
pub fn md_h_counts(gold: &MentionTable<'_>, pred: &MentionTable<'_>) -> Counts {
    let mut heads: BTreeMap<NodeId, (usize, usize)> = BTreeMap::new();
    for m in &gold.mentions {
        heads.entry(m.head).or_default().0 += 1;
    }
    for m in &pred.mentions {
        heads.entry(m.head).or_default().1 += 1;
    }
    let common: usize = heads.values().map(|&(g, p)| g.min(p)).sum();
    Counts {
        recall_num: common as f64,
        recall_den: gold.len() as f64,
        precision_num: common as f64,
        precision_den: pred.len() as f64,
    }
}

/// Anaphor-decomposable zero score.
///
/// A gold zero is anaphoric when an earlier mention of its entity exists.
/// It is resolved when it is aligned to a predicted zero whose predicted
/// entity holds another mention aligned to one of those earlier gold
/// mentions. Recall divides by the anaphoric gold zeros. Precision divides
/// by the anaphoric predicted zeros and counts a resolved gold zero only
/// when its predicted partner is anaphoric as well.
pub fn zero_counts(gold: &MentionTable<'_>, pred: &MentionTable<'_>, alignment: &MentionAlignment) -> Counts {
    let g2p = alignment.gold_to_pred(gold.len());
    let p2g = alignment.pred_to_gold(pred.len());
    let pred_anaphoric = |p: usize| {
        let key = pred.mentions[p].order_key();
        pred.mentions[p].is_zero && pred.clusters[pred.entity_of[p]].iter().any(|&q| q != p && pred.mentions[q].order_key() < key)
    };
    let mut anaphoric = 0usize;
    let mut resolved = 0usize;
    let mut resolved_pred = 0usize;
    for (g, gm) in gold.mentions.iter().enumerate() {
        if !gm.is_zero {
            continue;
        }
        let entity = gold.entity_of[g];
        let precedes = |other: usize| other != g && gold.mentions[other].order_key() < gm.order_key();
        if !gold.clusters[entity].iter().any(|&o| precedes(o)) {
            continue;
        }
        anaphoric += 1;
        let Some(p) = g2p[g] else { continue };
        if !pred.mentions[p].is_zero {
            continue;
        }
        let antecedent_found = pred.clusters[pred.entity_of[p]].iter().any(|&q| {
            q != p && p2g[q].is_some_and(|og| gold.entity_of[og] == entity && precedes(og))
        });
        if antecedent_found {
            resolved += 1;
            resolved_pred += pred_anaphoric(p) as usize;
        }
    }
    let predicted = (0..pred.len()).filter(|&p| pred_anaphoric(p)).count();
    Counts {
        recall_num: resolved as f64,
        recall_den: anaphoric as f64,
        precision_num: resolved_pred as f64,
        precision_den: predicted as f64,
    }
}
