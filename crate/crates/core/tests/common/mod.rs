//! Random CoNLL-U documents and brute-force metric definitions shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use corefud_core::model::parse_conllu;
use corefud_core::{Corpus, Document, NodeId, PRF};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const UPOS: [&str; 8] = ["NOUN", "PRON", "PROPN", "DET", "ADJ", "VERB", "ADV", "NUM"];
const DEPRELS: [&str; 8] = ["nsubj", "obj", "obl", "amod", "det", "nmod", "advmod", "flat"];
const VOCAB: [&str; 24] = [
    "the", "a", "dog", "cat", "saw", "ran", "it", "she", "he", "they", "house", "green", "old", "man", "woman", "and",
    "of", "to", "Prague", "said", "that", "was", "big", ",",
];

#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub major: u32,
    pub minor: u32,
    pub form: String,
    pub upos: &'static str,
    /// Basic head for words, enhanced parent for empty nodes.
    pub head: u32,
    pub deprel: &'static str,
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    pub doc_id: String,
    pub sentences: Vec<Vec<NodeSpec>>,
}

impl Skeleton {
    pub fn words(&self) -> usize {
        self.sentences.iter().flatten().filter(|n| n.minor == 0).count()
    }
}

/// Mentions as `(sentence, first node position, last node position)`,
/// grouped by entity.
pub type Clusters = Vec<Vec<(usize, usize, usize)>>;

#[derive(Clone, Copy, Debug)]
pub struct SkeletonConfig {
    pub sentences: (usize, usize),
    pub words: (usize, usize),
    /// Chance of an empty node after a word.
    pub empty_rate: f64,
    /// Chance that a word form contains a space.
    pub spaced_rate: f64,
}

impl Default for SkeletonConfig {
    fn default() -> Self {
        SkeletonConfig { sentences: (1, 5), words: (3, 12), empty_rate: 0.1, spaced_rate: 0.02 }
    }
}

pub fn random_skeleton(rng: &mut impl Rng, doc_id: &str, cfg: &SkeletonConfig) -> Skeleton {
    let n_sent = rng.random_range(cfg.sentences.0..=cfg.sentences.1);
    let mut sentences = Vec::new();
    for _ in 0..n_sent {
        let n = rng.random_range(cfg.words.0..=cfg.words.1) as u32;
        // random tree: attach words in random order to an already attached one
        let mut order: Vec<u32> = (1..=n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
        let mut heads = vec![0u32; n as usize + 1];
        for i in 1..order.len() {
            heads[order[i] as usize] = order[rng.random_range(0..i)];
        }
        let mut nodes = Vec::new();
        for major in 1..=n {
            let form = if rng.random_bool(cfg.spaced_rate) {
                "New York".to_string()
            } else {
                VOCAB.choose(rng).unwrap().to_string()
            };
            let head = heads[major as usize];
            let deprel = if head == 0 { "root" } else { DEPRELS.choose(rng).unwrap() };
            nodes.push(NodeSpec { major, minor: 0, form, upos: UPOS.choose(rng).unwrap(), head, deprel });
            if rng.random_bool(cfg.empty_rate) {
                let count = if rng.random_bool(0.2) { 2 } else { 1 };
                for minor in 1..=count {
                    let deprel = if rng.random_bool(0.5) { "nsubj" } else { "obj" };
                    nodes.push(NodeSpec { major, minor, form: "_".into(), upos: "PRON", head: major, deprel });
                }
            }
        }
        sentences.push(nodes);
    }
    Skeleton { doc_id: doc_id.to_string(), sentences }
}

#[derive(Clone, Copy, Debug)]
pub struct MentionConfig {
    pub mentions: (usize, usize),
    pub max_len: usize,
    /// Chance that a mention is a lone empty node (when the sentence has one).
    pub zero_rate: f64,
    /// Chance that a mention starts a new entity.
    pub new_entity_rate: f64,
}

impl Default for MentionConfig {
    fn default() -> Self {
        MentionConfig { mentions: (2, 10), max_len: 4, zero_rate: 0.2, new_entity_rate: 0.4 }
    }
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    let disjoint = a.1 < b.0 || b.1 < a.0;
    let nested = (a.0 <= b.0 && b.1 <= a.1) || (b.0 <= a.0 && a.1 <= b.1);
    !disjoint && !nested
}

/// Random non-crossing, pairwise distinct mention spans grouped into entities.
pub fn random_clusters(rng: &mut impl Rng, skel: &Skeleton, cfg: &MentionConfig) -> Clusters {
    let target = rng.random_range(cfg.mentions.0..=cfg.mentions.1);
    let mut taken: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut clusters: Clusters = Vec::new();
    let mut attempts = 0;
    while taken.len() < target && attempts < 50 * target + 50 {
        attempts += 1;
        let s = rng.random_range(0..skel.sentences.len());
        let nodes = &skel.sentences[s];
        let empties: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].minor > 0).collect();
        let span = if !empties.is_empty() && rng.random_bool(cfg.zero_rate) {
            let p = *empties.choose(rng).unwrap();
            (p, p)
        } else {
            let start = rng.random_range(0..nodes.len());
            let len = rng.random_range(1..=cfg.max_len);
            (start, (start + len - 1).min(nodes.len() - 1))
        };
        let clash = taken.iter().any(|&(t, a, b)| t == s && ((a, b) == span || crosses((a, b), span)));
        if clash {
            continue;
        }
        taken.insert((s, span.0, span.1));
        let mention = (s, span.0, span.1);
        if clusters.is_empty() || rng.random_bool(cfg.new_entity_rate) {
            clusters.push(vec![mention]);
        } else {
            let e = rng.random_range(0..clusters.len());
            clusters[e].push(mention);
        }
    }
    clusters
}

pub fn render(skel: &Skeleton, clusters: &Clusters) -> String {
    let mut items: BTreeMap<(usize, usize), (Vec<(usize, String)>, Vec<String>, Vec<(usize, String)>)> =
        BTreeMap::new();
    for (e, mentions) in clusters.iter().enumerate() {
        let id = format!("e{}", e + 1);
        for &(s, a, b) in mentions {
            if a == b {
                items.entry((s, a)).or_default().1.push(format!("({id})"));
            } else {
                items.entry((s, a)).or_default().0.push((b, format!("({id}")));
                items.entry((s, b)).or_default().2.push((a, format!("{id})")));
            }
        }
    }
    let mut out = String::new();
    for (s, nodes) in skel.sentences.iter().enumerate() {
        if s == 0 {
            out.push_str(&format!("# newdoc id = {}\n", skel.doc_id));
        }
        out.push_str(&format!("# sent_id = {}-{}\n", skel.doc_id, s + 1));
        let text: Vec<&str> = nodes.iter().filter(|n| n.minor == 0).map(|n| n.form.as_str()).collect();
        out.push_str(&format!("# text = {}\n", text.join(" ")));
        for (p, n) in nodes.iter().enumerate() {
            let misc = match items.get_mut(&(s, p)) {
                None => "_".to_string(),
                Some((opens, singles, closes)) => {
                    opens.sort_by_key(|x| std::cmp::Reverse(x.0));
                    closes.sort_by_key(|x| std::cmp::Reverse(x.0));
                    let mut v: String = opens.iter().map(|x| x.1.as_str()).collect();
                    v.extend(singles.iter().map(String::as_str));
                    v.extend(closes.iter().map(|x| x.1.as_str()));
                    format!("Entity={v}")
                }
            };
            if n.minor == 0 {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t{}:{}\t{misc}\n",
                    n.major, n.form, n.form, n.upos, n.head, n.deprel, n.head, n.deprel
                ));
            } else {
                out.push_str(&format!(
                    "{}.{}\t{}\t_\t{}\t_\t_\t_\t_\t{}:{}\t{misc}\n",
                    n.major, n.minor, n.form, n.upos, n.head, n.deprel
                ));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_doc(text: &str) -> Document {
    let mut corpus = parse_conllu(text).expect("generated CoNLL-U parses").corpus;
    assert_eq!(corpus.documents.len(), 1);
    corpus.documents.remove(0)
}

pub fn build(skel: &Skeleton, clusters: &Clusters) -> Document {
    parse_doc(&render(skel, clusters))
}

pub fn random_document(rng: &mut impl Rng, doc_id: &str, sk: &SkeletonConfig, mc: &MentionConfig) -> Document {
    let skel = random_skeleton(rng, doc_id, sk);
    let clusters = random_clusters(rng, &skel, mc);
    build(&skel, &clusters)
}

pub fn random_corpus(rng: &mut impl Rng, docs: usize, sk: &SkeletonConfig, mc: &MentionConfig) -> Corpus {
    Corpus { documents: (0..docs).map(|i| random_document(rng, &format!("doc{i}"), sk, mc)).collect() }
}

pub type Span = Vec<NodeId>;

/// Entities as lists of spans.
pub fn spans(doc: &Document) -> Vec<Vec<Span>> {
    doc.entities.iter().map(|e| e.mentions.iter().map(|m| m.span.clone()).collect()).collect()
}

/// The (cluster, span) multiset in a form independent of entity ids and order.
pub fn cluster_multiset(doc: &Document) -> Vec<Vec<Span>> {
    let mut out: Vec<Vec<Span>> = spans(doc)
        .into_iter()
        .map(|mut c| {
            c.sort();
            c
        })
        .collect();
    out.sort();
    out
}

// Metric definitions evaluated literally over spans.

fn ratio(n: f64, d: f64) -> f64 {
    if d > 0.0 {
        n / d
    } else {
        0.0
    }
}

pub fn prf(r: f64, p: f64) -> PRF {
    let f1 = if r + p > 0.0 { 2.0 * r * p / (r + p) } else { 0.0 };
    PRF { recall: r, precision: p, f1 }
}

fn cluster_of<'a>(side: &'a [Vec<Span>], m: &Span) -> Option<&'a Vec<Span>> {
    side.iter().find(|c| c.contains(m))
}

fn muc_side(key: &[Vec<Span>], resp: &[Vec<Span>]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for k in key {
        let mut parts: BTreeSet<usize> = BTreeSet::new();
        let mut lone = 0;
        for m in k {
            match resp.iter().position(|r| r.contains(m)) {
                Some(i) => {
                    parts.insert(i);
                }
                None => lone += 1,
            }
        }
        num += (k.len() - parts.len() - lone) as f64;
        den += (k.len() - 1) as f64;
    }
    (num, den)
}

pub fn muc(key: &[Vec<Span>], resp: &[Vec<Span>]) -> PRF {
    let (rn, rd) = muc_side(key, resp);
    let (pn, pd) = muc_side(resp, key);
    prf(ratio(rn, rd), ratio(pn, pd))
}

fn b3_side(key: &[Vec<Span>], resp: &[Vec<Span>]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for k in key {
        for m in k {
            den += 1.0;
            if let Some(r) = cluster_of(resp, m) {
                num += k.iter().filter(|x| r.contains(x)).count() as f64 / k.len() as f64;
            }
        }
    }
    (num, den)
}

pub fn bcubed(key: &[Vec<Span>], resp: &[Vec<Span>]) -> PRF {
    let (rn, rd) = b3_side(key, resp);
    let (pn, pd) = b3_side(resp, key);
    prf(ratio(rn, rd), ratio(pn, pd))
}

fn phi4(k: &[Span], r: &[Span]) -> f64 {
    let common = k.iter().filter(|m| r.contains(m)).count();
    2.0 * common as f64 / (k.len() + r.len()) as f64
}

/// Best total similarity over every one-to-one entity mapping.
fn best_mapping(sim: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
    if row == sim.len() {
        return 0.0;
    }
    let mut best = best_mapping(sim, row + 1, used);
    for c in 0..used.len() {
        if !used[c] {
            used[c] = true;
            best = best.max(sim[row][c] + best_mapping(sim, row + 1, used));
            used[c] = false;
        }
    }
    best
}

pub fn ceaf_e(key: &[Vec<Span>], resp: &[Vec<Span>]) -> PRF {
    let sim: Vec<Vec<f64>> = key.iter().map(|k| resp.iter().map(|r| phi4(k, r)).collect()).collect();
    let total = best_mapping(&sim, 0, &mut vec![false; resp.len()]);
    prf(ratio(total, key.len() as f64), ratio(total, resp.len() as f64))
}

fn links(side: &[Vec<Span>]) -> (BTreeSet<(Span, Span)>, BTreeSet<(Span, Span)>) {
    let mentions: Vec<(usize, &Span)> =
        side.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |m| (i, m))).collect();
    let (mut coref, mut non) = (BTreeSet::new(), BTreeSet::new());
    for (a, (ca, ma)) in mentions.iter().enumerate() {
        for (cb, mb) in &mentions[a + 1..] {
            let pair = if ma <= mb { ((*ma).clone(), (*mb).clone()) } else { ((*mb).clone(), (*ma).clone()) };
            if ca == cb {
                coref.insert(pair);
            } else {
                non.insert(pair);
            }
        }
    }
    (coref, non)
}

pub fn blanc(key: &[Vec<Span>], resp: &[Vec<Span>]) -> PRF {
    let (kc, kn) = links(key);
    let (rc, rn) = links(resp);
    let class = |k: &BTreeSet<(Span, Span)>, r: &BTreeSet<(Span, Span)>| {
        if k.is_empty() && r.is_empty() {
            return None;
        }
        let common = k.intersection(r).count() as f64;
        Some(prf(ratio(common, k.len() as f64), ratio(common, r.len() as f64)))
    };
    match (class(&kc, &rc), class(&kn, &rn)) {
        (None, None) => prf(0.0, 0.0),
        (Some(c), None) | (None, Some(c)) => c,
        (Some(c), Some(n)) => PRF {
            recall: (c.recall + n.recall) / 2.0,
            precision: (c.precision + n.precision) / 2.0,
            f1: (c.f1 + n.f1) / 2.0,
        },
    }
}

fn link_count(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

fn lea_side(key: &[Vec<Span>], resp: &[Vec<Span>]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for k in key {
        let resolution = if k.len() == 1 {
            match cluster_of(resp, &k[0]) {
                Some(r) if r.len() == 1 => 1.0,
                _ => 0.0,
            }
        } else {
            let found: f64 = resp.iter().map(|r| link_count(k.iter().filter(|m| r.contains(m)).count())).sum();
            found / link_count(k.len())
        };
        num += k.len() as f64 * resolution;
        den += k.len() as f64;
    }
    (num, den)
}

pub fn lea(key: &[Vec<Span>], resp: &[Vec<Span>]) -> PRF {
    let (rn, rd) = lea_side(key, resp);
    let (pn, pd) = lea_side(resp, key);
    prf(ratio(rn, rd), ratio(pn, pd))
}

pub fn without_singletons(side: &[Vec<Span>]) -> Vec<Vec<Span>> {
    side.iter().filter(|c| c.len() > 1).cloned().collect()
}

pub fn close(a: &PRF, b: &PRF, tol: f64) -> bool {
    (a.recall - b.recall).abs() <= tol && (a.precision - b.precision).abs() <= tol && (a.f1 - b.f1).abs() <= tol
}

/// A system-like variant of `gold`: mentions dropped, stretched or moved to
/// other entities, plus a few spurious ones; at most `max_mentions` total.
pub fn perturb(rng: &mut impl Rng, skel: &Skeleton, gold: &Clusters, max_mentions: usize) -> Clusters {
    let mut out: Clusters = vec![Vec::new(); gold.len()];
    let mut taken: Vec<(usize, usize, usize)> = Vec::new();
    let fits = |taken: &[(usize, usize, usize)], m: (usize, usize, usize)| {
        !taken.iter().any(|&(s, a, b)| s == m.0 && ((a, b) == (m.1, m.2) || crosses((a, b), (m.1, m.2))))
    };
    let mut candidates: Vec<(usize, (usize, usize, usize))> = Vec::new();
    for (e, mentions) in gold.iter().enumerate() {
        for &(s, a, b) in mentions {
            if rng.random_bool(0.15) {
                continue;
            }
            let len = skel.sentences[s].len();
            let (a, b) = if rng.random_bool(0.2) {
                (a, if rng.random_bool(0.5) { (b + 1).min(len - 1) } else { b.saturating_sub(1).max(a) })
            } else {
                (a, b)
            };
            let e = if rng.random_bool(0.2) { rng.random_range(0..gold.len() + 1) } else { e };
            candidates.push((e, (s, a, b)));
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let s = rng.random_range(0..skel.sentences.len());
        let a = rng.random_range(0..skel.sentences[s].len());
        let b = (a + rng.random_range(0..3)).min(skel.sentences[s].len() - 1);
        candidates.push((rng.random_range(0..gold.len() + 1), (s, a, b)));
    }
    out.push(Vec::new());
    for (e, m) in candidates {
        if taken.len() < max_mentions && fits(&taken, m) {
            taken.push(m);
            out[e].push(m);
        }
    }
    out.retain(|c| !c.is_empty());
    out
}
