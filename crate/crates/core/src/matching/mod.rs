//! One-to-one correspondence between gold and predicted mentions.
//!
//! Surface mentions are matched by span or head ([`match_surface`]); zero
//! mentions (headed by an empty node) are aligned sentence by sentence as a
//! weighted bipartite matching over their dependency attachment
//! ([`align_zeros`]). [`build_alignment`] combines both.

pub mod assignment;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Document, Mention, NodeId, Parent};
use assignment::Lex;

/// Largest per-side zero count solved by enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchRegime {
    Exact,
    Partial,
    #[default]
    Head,
}

impl MatchRegime {
    pub const ALL: [MatchRegime; 3] = [MatchRegime::Exact, MatchRegime::Partial, MatchRegime::Head];

    pub fn name(self) -> &'static str {
        match self {
            MatchRegime::Exact => "exact",
            MatchRegime::Partial => "partial",
            MatchRegime::Head => "head",
        }
    }
}

impl core::str::FromStr for MatchRegime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(MatchRegime::Exact),
            "partial" => Ok(MatchRegime::Partial),
            "head" => Ok(MatchRegime::Head),
            other => Err(alloc::format!("unknown match regime {other:?} (expected exact, partial or head)")),
        }
    }
}

impl fmt::Display for MatchRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pair weights for zero alignment: `parent` for attaching to the same
/// parent, `label_bonus` on top when the relation label also agrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroWeight {
    pub parent: f64,
    pub label_bonus: f64,
}

impl Default for ZeroWeight {
    fn default() -> Self {
        ZeroWeight { parent: 1.0, label_bonus: 1.0 }
    }
}

impl ZeroWeight {
    pub fn is_valid(&self) -> bool {
        self.parent >= 0.0 && self.label_bonus >= 0.0 && self.parent + self.label_bonus > 0.0
    }
}

/// Indices into the gold and predicted mention lists handed to a matcher.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MentionAlignment {
    /// `(gold, pred)`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_gold: Vec<usize>,
    pub unmatched_pred: Vec<usize>,
}

impl MentionAlignment {
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>, gold_len: usize, pred_len: usize) -> Self {
        pairs.sort_unstable();
        let mut gold_used = alloc::vec![false; gold_len];
        let mut pred_used = alloc::vec![false; pred_len];
        for &(g, p) in &pairs {
            debug_assert!(!gold_used[g] && !pred_used[p], "alignment must be injective");
            gold_used[g] = true;
            pred_used[p] = true;
        }
        MentionAlignment {
            pairs,
            unmatched_gold: (0..gold_len).filter(|&i| !gold_used[i]).collect(),
            unmatched_pred: (0..pred_len).filter(|&i| !pred_used[i]).collect(),
        }
    }

    /// `gold -> pred` lookup table.
    pub fn gold_to_pred(&self, gold_len: usize) -> Vec<Option<usize>> {
        let mut out = alloc::vec![None; gold_len];
        for &(g, p) in &self.pairs {
            out[g] = Some(p);
        }
        out
    }

    pub fn pred_to_gold(&self, pred_len: usize) -> Vec<Option<usize>> {
        let mut out = alloc::vec![None; pred_len];
        for &(g, p) in &self.pairs {
            out[p] = Some(g);
        }
        out
    }
}

fn intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn is_subset(small: &[NodeId], big: &[NodeId]) -> bool {
    intersection_len(small, big) == small.len()
}

/// Matches non-zero mentions under `regime`.
///
/// - exact: identical spans.
/// - head: identical heads; when several mentions share a head, identical
///   spans pair first, then larger overlap, then shorter combined length.
/// - partial: the predicted span lies inside the gold span and contains the
///   gold head; larger overlap wins.
pub fn match_surface(gold: &[&Mention], pred: &[&Mention], regime: MatchRegime) -> MentionAlignment {
    let pairs = match regime {
        MatchRegime::Exact => {
            let mut by_span: BTreeMap<&[NodeId], Vec<usize>> = BTreeMap::new();
            for (p, m) in pred.iter().enumerate().rev() {
                by_span.entry(m.span.as_slice()).or_default().push(p);
            }
            gold.iter()
                .enumerate()
                .filter_map(|(g, m)| Some((g, by_span.get_mut(m.span.as_slice())?.pop()?)))
                .collect()
        }
        MatchRegime::Head => {
            let mut groups: BTreeMap<NodeId, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
            for (g, m) in gold.iter().enumerate() {
                groups.entry(m.head).or_default().0.push(g);
            }
            for (p, m) in pred.iter().enumerate() {
                groups.entry(m.head).or_default().1.push(p);
            }
            let mut pairs = Vec::new();
            for (gs, ps) in groups.values() {
                if gs.is_empty() || ps.is_empty() {
                    continue;
                }
                if gs.len() == 1 && ps.len() == 1 {
                    pairs.push((gs[0], ps[0]));
                    continue;
                }
                let mut candidates: Vec<(bool, usize, usize, usize, usize)> = Vec::new();
                for &g in gs {
                    for &p in ps {
                        let (gm, pm) = (gold[g], pred[p]);
                        let exact = gm.span == pm.span;
                        let overlap = intersection_len(&gm.span, &pm.span);
                        candidates.push((exact, overlap, gm.span.len() + pm.span.len(), g, p));
                    }
                }
                candidates.sort_by(|a, b| {
                    b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)).then(a.4.cmp(&b.4))
                });
                greedy(&candidates.iter().map(|c| (c.3, c.4)).collect::<Vec<_>>(), &mut pairs);
            }
            pairs
        }
        MatchRegime::Partial => {
            let mut covering: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
            for (p, pm) in pred.iter().enumerate() {
                for &id in &pm.span {
                    covering.entry(id).or_default().push(p);
                }
            }
            let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
            for (g, gm) in gold.iter().enumerate() {
                for &p in covering.get(&gm.head).map(Vec::as_slice).unwrap_or_default() {
                    if is_subset(&pred[p].span, &gm.span) {
                        candidates.push((pred[p].span.len(), g, p));
                    }
                }
            }
            candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut pairs = Vec::new();
            greedy(&candidates.iter().map(|c| (c.1, c.2)).collect::<Vec<_>>(), &mut pairs);
            pairs
        }
    };
    MentionAlignment::from_pairs(pairs, gold.len(), pred.len())
}

/// Takes candidate pairs in order, skipping any whose side is already used.
fn greedy(candidates: &[(usize, usize)], out: &mut Vec<(usize, usize)>) {
    let mut used_g = BTreeMap::new();
    let mut used_p = BTreeMap::new();
    for &(g, p) in candidates {
        if used_g.contains_key(&g) || used_p.contains_key(&p) {
            continue;
        }
        used_g.insert(g, ());
        used_p.insert(p, ());
        out.push((g, p));
    }
}

/// What zero alignment needs to know about a zero mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroView {
    pub sentence: usize,
    /// Surface anchor (`major` of the empty node).
    pub position: u32,
    pub parent: Option<Parent>,
    pub relation: Option<String>,
    pub span: Vec<NodeId>,
}

impl ZeroView {
    pub fn of(doc: &Document, mention: &Mention) -> Self {
        let node = doc.node(mention.head);
        ZeroView {
            sentence: mention.head.sentence,
            position: mention.head.major,
            parent: node.and_then(|n| n.parent()),
            relation: node.and_then(|n| n.relation().map(String::from)),
            span: mention.span.clone(),
        }
    }

    fn parent_major(&self) -> Option<u32> {
        self.parent.map(|p| match p {
            Parent::Root => 0,
            Parent::Node(id) => id.major,
        })
    }
}

/// Scale of the distance term in the tie-breaker; the unit below it marks
/// pairs whose spans differ.
const DISTANCE_SCALE: i64 = 1 << 20;

/// Pair score: weight first, then closeness of surface positions, then
/// identical spans.
pub fn zero_pair_weight(gold: &ZeroView, pred: &ZeroView, weights: &ZeroWeight) -> Lex {
    let same_parent = gold.sentence == pred.sentence
        && gold.parent_major().is_some()
        && gold.parent_major() == pred.parent_major();
    let same_label = same_parent && gold.relation.is_some() && gold.relation == pred.relation;
    let mut primary = 0.0;
    if same_parent {
        primary += weights.parent;
    }
    if same_label {
        primary += weights.label_bonus;
    }
    let distance = (i64::from(gold.position) - i64::from(pred.position)).abs();
    let differs = i64::from(gold.span != pred.span);
    Lex { primary, secondary: -distance * DISTANCE_SCALE - differs }
}

/// Which solver handles a sentence's zeros.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeroSolver {
    /// Enumeration up to [`EXHAUSTIVE_LIMIT`] per side, Hungarian above.
    #[default]
    Auto,
    Exhaustive,
    Hungarian,
}

/// Aligns zero mentions within each sentence by maximum total pair weight.
/// Zero-weight pairs are never matched. Equal-weight solutions prefer the
/// smaller summed distance between surface anchors.
pub fn align_zeros(gold: &[ZeroView], pred: &[ZeroView], weights: &ZeroWeight) -> MentionAlignment {
    align_zeros_with(gold, pred, weights, ZeroSolver::Auto)
}

pub fn align_zeros_with(gold: &[ZeroView], pred: &[ZeroView], weights: &ZeroWeight, solver: ZeroSolver) -> MentionAlignment {
    let mut by_sentence: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, z) in gold.iter().enumerate() {
        by_sentence.entry(z.sentence).or_default().0.push(i);
    }
    for (i, z) in pred.iter().enumerate() {
        by_sentence.entry(z.sentence).or_default().1.push(i);
    }
    let mut pairs = Vec::new();
    for (gs, ps) in by_sentence.values() {
        if gs.is_empty() || ps.is_empty() {
            continue;
        }
        let w = |r: usize, c: usize| zero_pair_weight(&gold[gs[r]], &pred[ps[c]], weights);
        let small = gs.len() <= EXHAUSTIVE_LIMIT && ps.len() <= EXHAUSTIVE_LIMIT;
        let local = match (solver, small) {
            (ZeroSolver::Exhaustive, _) | (ZeroSolver::Auto, true) => assignment::exhaustive(gs.len(), ps.len(), w),
            _ => assignment::hungarian(gs.len(), ps.len(), w),
        };
        pairs.extend(local.into_iter().map(|(r, c)| (gs[r], ps[c])));
    }
    MentionAlignment::from_pairs(pairs, gold.len(), pred.len())
}

/// Raised when gold and prediction do not share the same token sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenMismatch {
    pub doc_id: String,
    pub detail: String,
}

impl fmt::Display for TokenMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "document {}: {}; gold and prediction must share one token sequence (run the cleaner first)",
            self.doc_id, self.detail
        )
    }
}

impl core::error::Error for TokenMismatch {}

pub fn check_tokens(gold: &Document, pred: &Document) -> Result<(), TokenMismatch> {
    let mismatch = |detail: String| TokenMismatch { doc_id: gold.doc_id.clone(), detail };
    if gold.doc_id != pred.doc_id {
        return Err(mismatch(alloc::format!("prediction has document {:?} in this position", pred.doc_id)));
    }
    let (g, p) = (gold.token_forms(), pred.token_forms());
    if g.len() != p.len() {
        return Err(mismatch(alloc::format!("{} gold sentences vs {} predicted", g.len(), p.len())));
    }
    for (i, (gs, ps)) in g.iter().zip(&p).enumerate() {
        if gs != ps {
            return Err(mismatch(alloc::format!("sentence {} differs ({} vs {} tokens)", i + 1, gs.len(), ps.len())));
        }
    }
    Ok(())
}

/// Aligns all mentions of two versions of one document: surface mentions by
/// `regime`, zero mentions by [`align_zeros`]. Indices refer to `gold` and
/// `pred`.
pub fn build_alignment(
    gold_doc: &Document,
    pred_doc: &Document,
    gold: &[&Mention],
    pred: &[&Mention],
    regime: MatchRegime,
    weights: &ZeroWeight,
) -> Result<MentionAlignment, TokenMismatch> {
    check_tokens(gold_doc, pred_doc)?;
    let split = |ms: &[&Mention]| -> (Vec<usize>, Vec<usize>) { (0..ms.len()).partition(|&i| !ms[i].is_zero) };
    let (g_surface, g_zero) = split(gold);
    let (p_surface, p_zero) = split(pred);

    let gs: Vec<&Mention> = g_surface.iter().map(|&i| gold[i]).collect();
    let ps: Vec<&Mention> = p_surface.iter().map(|&i| pred[i]).collect();
    let surface = match_surface(&gs, &ps, regime);

    let gz: Vec<ZeroView> = g_zero.iter().map(|&i| ZeroView::of(gold_doc, gold[i])).collect();
    let pz: Vec<ZeroView> = p_zero.iter().map(|&i| ZeroView::of(pred_doc, pred[i])).collect();
    let zeros = align_zeros(&gz, &pz, weights);

    let pairs = surface
        .pairs
        .iter()
        .map(|&(g, p)| (g_surface[g], p_surface[p]))
        .chain(zeros.pairs.iter().map(|&(g, p)| (g_zero[g], p_zero[p])))
        .collect();
    Ok(MentionAlignment::from_pairs(pairs, gold.len(), pred.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mention(span: &[u32], head: u32) -> Mention {
        Mention {
            entity_id: "e".into(),
            span: span.iter().map(|&m| NodeId::word(0, m)).collect(),
            head: NodeId::word(0, head),
            is_zero: false,
        }
    }

    fn refs(ms: &[Mention]) -> Vec<&Mention> {
        ms.iter().collect()
    }

    #[test]
    fn head_match_ignores_span() {
        let g = [mention(&[3, 4, 5], 4)];
        let p = [mention(&[4], 4)];
        let a = match_surface(&refs(&g), &refs(&p), MatchRegime::Head);
        assert_eq!(a.pairs, [(0, 0)]);
        let a = match_surface(&refs(&g), &refs(&p), MatchRegime::Exact);
        assert!(a.pairs.is_empty());
        assert_eq!(a.unmatched_gold, [0]);
        assert_eq!(a.unmatched_pred, [0]);
    }

    #[test]
    fn head_collision_pairs_equal_spans() {
        let g = [mention(&[7], 7), mention(&[6, 7, 8], 7)];
        let p = [mention(&[6, 7, 8], 7), mention(&[7], 7)];
        let a = match_surface(&refs(&g), &refs(&p), MatchRegime::Head);
        assert_eq!(a.pairs, [(0, 1), (1, 0)]);
    }

    #[test]
    fn partial_requires_subset_with_gold_head() {
        let g = [mention(&[3, 4, 5], 4)];
        let inside = [mention(&[4, 5], 5)];
        assert_eq!(match_surface(&refs(&g), &refs(&inside), MatchRegime::Partial).pairs, [(0, 0)]);
        let no_head = [mention(&[5], 5)];
        assert!(match_surface(&refs(&g), &refs(&no_head), MatchRegime::Partial).pairs.is_empty());
        let wider = [mention(&[2, 3, 4, 5], 4)];
        assert!(match_surface(&refs(&g), &refs(&wider), MatchRegime::Partial).pairs.is_empty());
    }

    fn zero(position: u32, parent: u32, rel: Option<&str>) -> ZeroView {
        ZeroView {
            sentence: 0,
            position,
            parent: Some(Parent::Node(NodeId::word(0, parent))),
            relation: rel.map(String::from),
            span: vec![NodeId::new(0, position, 1)],
        }
    }

    #[test]
    fn zero_weights() {
        let w = ZeroWeight::default();
        assert_eq!(zero_pair_weight(&zero(5, 5, Some("nsubj")), &zero(5, 5, Some("nsubj")), &w).primary, 2.0);
        assert_eq!(zero_pair_weight(&zero(5, 5, Some("nsubj")), &zero(5, 5, None), &w).primary, 1.0);
        assert_eq!(zero_pair_weight(&zero(5, 5, Some("nsubj")), &zero(5, 6, Some("nsubj")), &w).primary, 0.0);
    }

    #[test]
    fn zero_alignment_picks_best() {
        let g = vec![zero(2, 2, Some("nsubj")), zero(2, 2, Some("obj"))];
        let p = vec![zero(3, 2, Some("obj"))];
        let a = align_zeros(&g, &p, &ZeroWeight::default());
        assert_eq!(a.pairs, [(1, 0)]);
        assert_eq!(a.unmatched_gold, [0]);
    }

    #[test]
    fn identical_zeros_pair_up() {
        let mut a = zero(2, 2, Some("nsubj"));
        let mut b = zero(2, 2, Some("nsubj"));
        a.span = vec![NodeId::new(0, 2, 1)];
        b.span = vec![NodeId::new(0, 2, 2)];
        let g = vec![a.clone(), b.clone()];
        for solver in [ZeroSolver::Exhaustive, ZeroSolver::Hungarian] {
            let al = align_zeros_with(&g, &[b.clone(), a.clone()], &ZeroWeight::default(), solver);
            assert_eq!(al.pairs, [(0, 1), (1, 0)]);
        }
    }

    #[test]
    fn zeros_in_other_sentences_never_pair() {
        let g = vec![zero(2, 2, Some("nsubj"))];
        let mut other = zero(2, 2, Some("nsubj"));
        other.sentence = 1;
        assert!(align_zeros(&g, &[other], &ZeroWeight::default()).pairs.is_empty());
    }

    #[test]
    fn regime_names_parse() {
        for r in MatchRegime::ALL {
            assert_eq!(r.name().parse::<MatchRegime>().unwrap(), r);
        }
        assert!("fuzzy".parse::<MatchRegime>().is_err());
    }
}
