//! Link-, mention- and entity-based cluster metrics over keyed clusters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{ratio, Counts, PRF};
use crate::matching::{assignment, MentionAlignment};

/// Both partitions expressed over one key space: gold mention `i` has key
/// `i`, a predicted mention aligned to gold `i` also gets key `i`, and an
/// unaligned predicted mention `p` gets key `gold_mentions + p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyedClusters {
    pub gold: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
}

impl KeyedClusters {
    /// `gold_entities[e]` lists the gold mention indices of entity `e`
    /// (indices as used by `alignment`); likewise for `pred_entities`.
    pub fn new(
        gold_entities: &[Vec<usize>],
        pred_entities: &[Vec<usize>],
        alignment: &MentionAlignment,
        gold_mentions: usize,
        pred_mentions: usize,
    ) -> Self {
        let p2g = alignment.pred_to_gold(pred_mentions);
        let key = |p: usize| p2g[p].unwrap_or(gold_mentions + p);
        KeyedClusters {
            gold: gold_entities.to_vec(),
            pred: pred_entities.iter().map(|e| e.iter().map(|&p| key(p)).collect()).collect(),
        }
    }

    pub fn without_singletons(&self) -> Self {
        let keep = |side: &Vec<Vec<usize>>| side.iter().filter(|c| c.len() > 1).cloned().collect();
        KeyedClusters { gold: keep(&self.gold), pred: keep(&self.pred) }
    }

    fn key_space(&self) -> usize {
        self.gold.iter().chain(&self.pred).flatten().max().map_or(0, |&k| k + 1)
    }

    fn membership(side: &[Vec<usize>], space: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; space];
        for (c, keys) in side.iter().enumerate() {
            for &k in keys {
                out[k] = Some(c);
            }
        }
        out
    }

    /// Non-zero overlaps `|K ∩ R|` as `(gold cluster, pred cluster) -> size`.
    pub fn overlaps(&self) -> BTreeMap<(usize, usize), usize> {
        let pred_of = Self::membership(&self.pred, self.key_space());
        let mut out = BTreeMap::new();
        for (g, keys) in self.gold.iter().enumerate() {
            for &k in keys {
                if let Some(p) = pred_of[k] {
                    *out.entry((g, p)).or_insert(0) += 1;
                }
            }
        }
        out
    }
}

fn pairs(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// MUC: `Σ (|K| − partitions of K) / Σ (|K| − 1)` for recall, dual for
/// precision. Keys missing on the other side are partitions of their own.
pub fn muc_counts(c: &KeyedClusters) -> Counts {
    let space = c.key_space();
    let side = |keyed: &[Vec<usize>], other: &[Vec<usize>]| -> (f64, f64) {
        let other_of = KeyedClusters::membership(other, space);
        let (mut num, mut den) = (0.0, 0.0);
        for cluster in keyed {
            let mut seen: Vec<usize> = Vec::new();
            let mut partitions = 0usize;
            for &k in cluster {
                match other_of[k] {
                    Some(o) if seen.contains(&o) => {}
                    Some(o) => {
                        seen.push(o);
                        partitions += 1;
                    }
                    None => partitions += 1,
                }
            }
            num += (cluster.len() - partitions) as f64;
            den += cluster.len().saturating_sub(1) as f64;
        }
        (num, den)
    };
    let (recall_num, recall_den) = side(&c.gold, &c.pred);
    let (precision_num, precision_den) = side(&c.pred, &c.gold);
    Counts { recall_num, recall_den, precision_num, precision_den }
}

/// B³: per-mention overlap ratio averaged over mentions.
pub fn bcubed_counts(c: &KeyedClusters) -> Counts {
    let overlaps = c.overlaps();
    let mut counts = Counts {
        recall_den: c.gold.iter().map(Vec::len).sum::<usize>() as f64,
        precision_den: c.pred.iter().map(Vec::len).sum::<usize>() as f64,
        ..Default::default()
    };
    for (&(g, p), &n) in &overlaps {
        let sq = (n * n) as f64;
        counts.recall_num += sq / c.gold[g].len() as f64;
        counts.precision_num += sq / c.pred[p].len() as f64;
    }
    counts
}

/// Entity-based CEAF with `φ4(K, R) = 2|K ∩ R| / (|K| + |R|)` and an
/// optimal one-to-one entity alignment.
pub fn ceaf_e_counts(c: &KeyedClusters) -> Counts {
    let overlaps = c.overlaps();
    let phi = |g: usize, p: usize, n: usize| 2.0 * n as f64 / (c.gold[g].len() + c.pred[p].len()) as f64;

    // the alignment decomposes over connected components of the overlap graph
    let (ng, np) = (c.gold.len(), c.pred.len());
    let mut parent: Vec<usize> = (0..ng + np).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(g, p) in overlaps.keys() {
        let (a, b) = (find(&mut parent, g), find(&mut parent, ng + p));
        parent[a] = b;
    }
    let mut components: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for g in 0..ng {
        let root = find(&mut parent, g);
        components.entry(root).or_default().0.push(g);
    }
    for p in 0..np {
        let root = find(&mut parent, ng + p);
        components.entry(root).or_default().1.push(p);
    }
    let mut similarity = 0.0;
    for (gs, ps) in components.values() {
        if gs.is_empty() || ps.is_empty() {
            continue;
        }
        let w = |r: usize, col: usize| {
            overlaps.get(&(gs[r], ps[col])).map_or(0.0, |&n| phi(gs[r], ps[col], n))
        };
        let best = assignment::hungarian(gs.len(), ps.len(), w);
        similarity += assignment::total(&best, w);
    }
    Counts { recall_num: similarity, recall_den: ng as f64, precision_num: similarity, precision_den: np as f64 }
}

/// Link counts of one BLANC class: links on both sides, and each side's total.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LinkCounts {
    pub common: f64,
    pub gold: f64,
    pub pred: f64,
}

impl LinkCounts {
    pub fn prf(&self) -> PRF {
        PRF::new(ratio(self.common, self.gold), ratio(self.common, self.pred))
    }

    fn is_empty(&self) -> bool {
        self.gold <= 0.0 && self.pred <= 0.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlancCounts {
    pub coref: LinkCounts,
    pub non_coref: LinkCounts,
}

impl core::ops::AddAssign for BlancCounts {
    fn add_assign(&mut self, o: BlancCounts) {
        for (a, b) in [(&mut self.coref, o.coref), (&mut self.non_coref, o.non_coref)] {
            a.common += b.common;
            a.gold += b.gold;
            a.pred += b.pred;
        }
    }
}

impl BlancCounts {
    /// Mean of the two link classes. A class with no links on either side
    /// drops out and the other class is reported alone.
    pub fn prf(&self) -> PRF {
        match (self.coref.is_empty(), self.non_coref.is_empty()) {
            (true, true) => PRF::ZERO,
            (true, false) => self.non_coref.prf(),
            (false, true) => self.coref.prf(),
            (false, false) => {
                let (c, n) = (self.coref.prf(), self.non_coref.prf());
                PRF {
                    recall: (c.recall + n.recall) / 2.0,
                    precision: (c.precision + n.precision) / 2.0,
                    f1: (c.f1 + n.f1) / 2.0,
                }
            }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.coref.is_empty() || self.non_coref.is_empty()
    }
}

/// BLANC link counts for one document, extended to differing mention sets:
/// non-coreference links are counted among each side's own mentions and the
/// common ones among mentions present on both sides.
pub fn blanc_counts(c: &KeyedClusters) -> BlancCounts {
    let space = c.key_space();
    let gold_of = KeyedClusters::membership(&c.gold, space);
    let pred_of = KeyedClusters::membership(&c.pred, space);
    let gold_mentions: usize = c.gold.iter().map(Vec::len).sum();
    let pred_mentions: usize = c.pred.iter().map(Vec::len).sum();
    let gold_coref: f64 = c.gold.iter().map(|k| pairs(k.len())).sum();
    let pred_coref: f64 = c.pred.iter().map(|r| pairs(r.len())).sum();
    let common_coref: f64 = c.overlaps().values().map(|&n| pairs(n)).sum();

    // keys present on both sides, grouped by cluster on each side
    let mut shared = 0usize;
    let mut per_gold = vec![0usize; c.gold.len()];
    let mut per_pred = vec![0usize; c.pred.len()];
    for k in 0..space {
        if let (Some(g), Some(p)) = (gold_of[k], pred_of[k]) {
            shared += 1;
            per_gold[g] += 1;
            per_pred[p] += 1;
        }
    }
    let same_gold: f64 = per_gold.iter().map(|&n| pairs(n)).sum();
    let same_pred: f64 = per_pred.iter().map(|&n| pairs(n)).sum();
    let common_non = pairs(shared) - same_gold - same_pred + common_coref;

    BlancCounts {
        coref: LinkCounts { common: common_coref, gold: gold_coref, pred: pred_coref },
        non_coref: LinkCounts {
            common: common_non,
            gold: pairs(gold_mentions) - gold_coref,
            pred: pairs(pred_mentions) - pred_coref,
        },
    }
}

/// LEA: link-based resolution weighted by entity size. An entity of size 1
/// has a single self-link, resolved when the mention is also a singleton on
/// the other side; in singleton-excluded scoring such entities are already
/// gone.
pub fn lea_counts(c: &KeyedClusters) -> Counts {
    let space = c.key_space();
    let side = |keyed: &[Vec<usize>], other: &[Vec<usize>]| -> (f64, f64) {
        let other_of = KeyedClusters::membership(other, space);
        let (mut num, mut den) = (0.0, 0.0);
        for cluster in keyed {
            let size = cluster.len();
            if size == 0 {
                continue;
            }
            let resolution = if size == 1 {
                match other_of[cluster[0]] {
                    Some(o) if other[o].len() == 1 => 1.0,
                    _ => 0.0,
                }
            } else {
                let mut per_other: BTreeMap<usize, usize> = BTreeMap::new();
                for &k in cluster {
                    if let Some(o) = other_of[k] {
                        *per_other.entry(o).or_insert(0) += 1;
                    }
                }
                per_other.values().map(|&n| pairs(n)).sum::<f64>() / pairs(size)
            };
            num += size as f64 * resolution;
            den += size as f64;
        }
        (num, den)
    };
    let (recall_num, recall_den) = side(&c.gold, &c.pred);
    let (precision_num, precision_den) = side(&c.pred, &c.gold);
    Counts { recall_num, recall_den, precision_num, precision_den }
}

#[cfg(test)]
mod tests {
    use super::*;

    // keys: a=0, b=1, c=2, d=3
    fn kc(gold: &[&[usize]], pred: &[&[usize]]) -> KeyedClusters {
        KeyedClusters {
            gold: gold.iter().map(|c| c.to_vec()).collect(),
            pred: pred.iter().map(|c| c.to_vec()).collect(),
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn muc_split_entity() {
        let p = muc_counts(&kc(&[&[0, 1, 2]], &[&[0, 1], &[2]])).prf();
        assert!(close(p.recall, 0.5) && close(p.precision, 1.0) && close(p.f1, 2.0 / 3.0));
    }

    #[test]
    fn muc_crossed_pairs_score_zero() {
        let p = muc_counts(&kc(&[&[0, 1], &[2, 3]], &[&[0, 2], &[1, 3]])).prf();
        assert_eq!(p.f1, 0.0);
    }

    #[test]
    fn bcubed_halves() {
        let p = bcubed_counts(&kc(&[&[0, 1, 2, 3]], &[&[0, 1], &[2, 3]])).prf();
        assert!(close(p.recall, 0.5) && close(p.precision, 1.0) && close(p.f1, 2.0 / 3.0));
    }

    #[test]
    fn bcubed_fragmented() {
        let p = bcubed_counts(&kc(&[&[0, 1, 2, 3]], &[&[0], &[1], &[2], &[3]])).prf();
        assert!(close(p.recall, 0.25) && close(p.precision, 1.0));
    }

    #[test]
    fn ceaf_one_gold_two_halves() {
        let p = ceaf_e_counts(&kc(&[&[0, 1, 2, 3]], &[&[0, 1], &[2, 3]])).prf();
        let phi = 2.0 * 2.0 / 6.0;
        assert!(close(p.recall, phi) && close(p.precision, phi / 2.0));
    }

    #[test]
    fn lea_split_entity() {
        let c = kc(&[&[0, 1, 2]], &[&[0, 1], &[2]]);
        let excluded = lea_counts(&c.without_singletons()).prf();
        assert!(close(excluded.recall, 1.0 / 3.0) && close(excluded.precision, 1.0));
        let included = lea_counts(&c).prf();
        assert!(close(included.precision, 2.0 / 3.0));
    }

    #[test]
    fn blanc_single_mention_document() {
        let b = blanc_counts(&kc(&[&[0]], &[&[0]]));
        assert!(b.coref.is_empty() && b.non_coref.is_empty());
        assert_eq!(b.prf(), PRF::ZERO);
    }

    #[test]
    fn blanc_missing_coref_link() {
        // gold {a,b},{c}; pred {a},{b},{c}
        let b = blanc_counts(&kc(&[&[0, 1], &[2]], &[&[0], &[1], &[2]]));
        assert_eq!(b.coref, LinkCounts { common: 0.0, gold: 1.0, pred: 0.0 });
        assert_eq!(b.non_coref, LinkCounts { common: 2.0, gold: 2.0, pred: 3.0 });
        let p = b.prf();
        assert!(close(p.recall, 0.5));
        assert!(close(p.precision, (0.0 + 2.0 / 3.0) / 2.0));
    }
}
