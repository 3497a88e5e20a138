#![allow(clippy::type_complexity)]
mod common;

use std::collections::BTreeMap;

use common::{parse_doc, random_document, MentionConfig, SkeletonConfig, Span};
use corefud_core::matching::ZeroWeight;
use corefud_core::metrics::score_document;
use corefud_core::{Document, Entity, MatchRegime, MetricId, NodeId, ScoreConfig, SingletonMode, PRF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(regime: MatchRegime, singletons: SingletonMode) -> ScoreConfig {
    ScoreConfig { regime, singletons, zero_weights: ZeroWeight::default() }
}

/// Three sentences: `Anna came`, `ran` with a dropped subject, `Petr left`
/// with a second dropped subject. `misc` holds the six Entity columns.
fn zero_doc(misc: [&str; 6]) -> Document {
    let cell = |i: usize| if misc[i].is_empty() { "_".to_string() } else { format!("Entity={}", misc[i]) };
    let text = format!(
        "# newdoc id = z\n# sent_id = z-1\n# text = Anna came\n\
         1\tAnna\tAnna\tPROPN\t_\t_\t2\tnsubj\t2:nsubj\t{}\n\
         2\tcame\tcome\tVERB\t_\t_\t0\troot\t0:root\t{}\n\n\
         # sent_id = z-2\n# text = ran\n\
         1\tran\trun\tVERB\t_\t_\t0\troot\t0:root\t{}\n\
         1.1\t_\t_\tPRON\t_\t_\t_\t_\t1:nsubj\t{}\n\n\
         # sent_id = z-3\n# text = Petr left\n\
         1\tPetr\tPetr\tPROPN\t_\t_\t2\tnsubj\t2:nsubj\t{}\n\
         2\tleft\tleave\tVERB\t_\t_\t0\troot\t0:root\t_\n\
         2.1\t_\t_\tPRON\t_\t_\t_\t_\t2:nsubj\t{}\n\n",
        cell(0),
        cell(1),
        cell(2),
        cell(3),
        cell(4),
        cell(5)
    );
    parse_doc(&text)
}

fn gold_zero_doc() -> Document {
    zero_doc(["(e1)", "", "", "(e1)", "(e2)", "(e2)"])
}

fn zero_score(gold: &Document, pred: &Document, mode: SingletonMode) -> PRF {
    score_document(gold, pred, &config(MatchRegime::Head, mode)).unwrap().get(MetricId::ZeroScore)
}

#[test]
fn perfect_zero_prediction() {
    let g = gold_zero_doc();
    for mode in [SingletonMode::Included, SingletonMode::Excluded] {
        let s = zero_score(&g, &g, mode);
        assert_eq!((s.recall, s.precision, s.f1), (1.0, 1.0, 1.0));
    }
}

#[test]
fn misclustered_zero_is_unresolved() {
    let g = gold_zero_doc();
    let p = zero_doc(["(e1)", "", "", "(e1)", "(e2)", "(e1)"]);
    let s = zero_score(&g, &p, SingletonMode::Included);
    assert_eq!((s.recall, s.precision), (0.5, 0.5));
}

#[test]
fn zero_clustered_alone_is_unresolved() {
    let g = gold_zero_doc();
    let p = zero_doc(["(e1)", "", "", "(e1)", "(e2)", "(e3)"]);
    let s = zero_score(&g, &p, SingletonMode::Included);
    assert_eq!((s.recall, s.precision), (0.5, 1.0));
}

#[test]
fn non_anaphoric_zeros_are_not_counted() {
    let g = zero_doc(["", "", "", "(e1)", "", "(e1)"]);
    let s = zero_score(&g, &g, SingletonMode::Included);
    assert_eq!((s.recall, s.precision), (1.0, 1.0));
}

fn key(s: &Span) -> (NodeId, std::cmp::Reverse<NodeId>) {
    (s[0], std::cmp::Reverse(*s.last().unwrap()))
}

/// Same mentions, random entities.
fn recluster(rng: &mut impl Rng, doc: &Document) -> Document {
    let mentions: Vec<_> = doc.entities.iter().flat_map(|e| e.mentions.iter().cloned()).collect();
    let k = rng.random_range(1..=mentions.len().max(1));
    let mut entities: Vec<Entity> = (0..k).map(|i| Entity { id: format!("r{i}"), mentions: Vec::new() }).collect();
    for mut m in mentions {
        let e = rng.random_range(0..k);
        m.entity_id = entities[e].id.clone();
        entities[e].mentions.push(m);
    }
    entities.retain(|e| !e.mentions.is_empty());
    let mut out = doc.clone();
    out.entities = entities;
    out.normalize_entity_order();
    out
}

/// The resolution rule replayed over spans; with identical mention sets
/// every mention is aligned to the one with the same span.
fn replay(gold: &Document, pred: &Document) -> (f64, f64, f64, f64) {
    let side = |doc: &Document| -> BTreeMap<Span, usize> {
        doc.entities
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.mentions.iter().map(move |m| (m.span.clone(), i)))
            .collect()
    };
    let (ge, pe) = (side(gold), side(pred));
    let zeros: Vec<Span> =
        gold.entities.iter().flat_map(|e| &e.mentions).filter(|m| m.is_zero).map(|m| m.span.clone()).collect();
    let earlier = |ent: &BTreeMap<Span, usize>, z: &Span| ent.iter().any(|(t, &e)| e == ent[z] && key(t) < key(z));
    let (mut rn, mut rd, mut pn, mut pd) = (0.0, 0.0, 0.0, 0.0);
    for z in &zeros {
        let pred_anaphoric = earlier(&pe, z);
        pd += f64::from(u8::from(pred_anaphoric));
        if !earlier(&ge, z) {
            continue;
        }
        rd += 1.0;
        let resolved = pe.iter().any(|(t, &e)| t != z && e == pe[z] && ge[t] == ge[z] && key(t) < key(z));
        if resolved {
            rn += 1.0;
            pn += f64::from(u8::from(pred_anaphoric));
        }
    }
    (rn, rd, pn, pd)
}

#[test]
fn zero_score_matches_rule_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sk = SkeletonConfig { empty_rate: 0.4, ..SkeletonConfig::default() };
    let mc = MentionConfig { mentions: (4, 12), zero_rate: 0.4, ..MentionConfig::default() };
    let mut checked = 0;
    while checked < 300 {
        let gold = random_document(&mut rng, "r", &sk, &mc);
        if replay(&gold, &gold).1 == 0.0 {
            continue;
        }
        let pred = recluster(&mut rng, &gold);
        let (rn, rd, pn, pd) = replay(&gold, &pred);
        let s = score_document(&gold, &pred, &config(MatchRegime::Exact, SingletonMode::Included))
            .unwrap()
            .get(MetricId::ZeroScore);
        let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
        assert!((s.recall - ratio(rn, rd)).abs() < 1e-12, "recall {} vs {rn}/{rd}", s.recall);
        assert!((s.precision - ratio(pn, pd)).abs() < 1e-12, "precision {} vs {pn}/{pd}", s.precision);
        assert!(s.precision <= 1.0 && s.recall <= 1.0);
        checked += 1;
    }
}

#[test]
fn mor_head_only_span() {
    let g = zero_doc(["(e1", "e1)", "", "", "(e1)", ""]);
    let p = zero_doc(["", "(e1)", "", "", "(e1)", ""]);
    let t = score_document(&g, &p, &config(MatchRegime::Head, SingletonMode::Included)).unwrap();
    let mor = t.get(MetricId::Mor);
    assert!((mor.recall - (0.5 + 1.0) / 2.0).abs() < 1e-12);
    let md = t.get(MetricId::MdH);
    assert_eq!((md.recall, md.precision), (1.0, 1.0));
}

#[test]
fn md_h_counts_spurious_head() {
    let g = zero_doc(["(e1)", "", "", "", "(e1)", ""]);
    let p = zero_doc(["(e1)", "", "(e2)", "", "(e1)", ""]);
    let md = score_document(&g, &p, &config(MatchRegime::Head, SingletonMode::Included)).unwrap().get(MetricId::MdH);
    assert_eq!(md.recall, 1.0);
    assert!((md.precision - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn no_matches_score_zero() {
    let g = zero_doc(["(e1)", "", "", "", "(e1)", ""]);
    let p = zero_doc(["", "(e1)", "(e1)", "", "", ""]);
    let t = score_document(&g, &p, &config(MatchRegime::Exact, SingletonMode::Included)).unwrap();
    for metric in [MetricId::Mor, MetricId::MdH] {
        let s = t.get(metric);
        assert_eq!((s.recall, s.precision, s.f1), (0.0, 0.0, 0.0), "{metric}");
    }
}
