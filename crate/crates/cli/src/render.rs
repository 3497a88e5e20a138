//! Text renderings of command results.

use std::fmt::Write as _;

use corefud_core::analysis::{CorpusStats, RangeCurvePoint};
use corefud_core::metrics::{Diagnostic, ScoreReport};
use corefud_core::{MetricId, ScoreConfig, PRF};
use serde_json::json;

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

/// CoNLL F1 of each scoring variant, one row per dataset plus `macro`.
pub fn variants_tsv(labels: &[&str], rows: &[(String, Vec<f64>)]) -> String {
    let mut out = String::from("dataset");
    for l in labels {
        let _ = write!(out, "\t{l}");
    }
    out.push('\n');
    for (name, f1s) in rows {
        out.push_str(name);
        for f in f1s {
            let _ = write!(out, "\t{}", pct(*f));
        }
        out.push('\n');
    }
    if !rows.is_empty() {
        out.push_str("macro");
        for i in 0..labels.len() {
            let mean = rows.iter().map(|(_, f)| f[i]).sum::<f64>() / rows.len() as f64;
            let _ = write!(out, "\t{}", pct(mean));
        }
        out.push('\n');
    }
    out
}

fn record(dataset: &str, config: &ScoreConfig, metric: MetricId, s: &PRF) -> serde_json::Value {
    json!({
        "dataset": dataset,
        "regime": config.regime.name(),
        "singletons": config.singletons.name(),
        "metric": metric.name(),
        "recall": s.recall,
        "precision": s.precision,
        "f1": s.f1,
    })
}

/// One JSON object per (dataset, metric), the macro average under dataset
/// `macro`, then one object per 0/0 diagnostic.
pub fn scores_jsonl(report: &ScoreReport, config: &ScoreConfig, diagnostics: &[(String, Vec<Diagnostic>)]) -> String {
    let mut out = String::new();
    for (name, scores) in &report.per_dataset {
        for (metric, s) in scores {
            out.push_str(&record(name, config, *metric, s).to_string());
            out.push('\n');
        }
    }
    for (metric, s) in &report.macro_avg {
        out.push_str(&record("macro", config, *metric, s).to_string());
        out.push('\n');
    }
    for (name, diags) in diagnostics {
        for d in diags {
            let v = json!({ "dataset": name, "document": d.doc_id, "metric": d.metric.name(), "diagnostic": "zero denominator" });
            out.push_str(&v.to_string());
            out.push('\n');
        }
    }
    out
}

const STATS_HEADER: &[&str] = &[
    "dataset",
    "docs",
    "sents",
    "words",
    "empty",
    "entities",
    "entities/1k",
    "entity_len_max",
    "entity_len_avg",
    "p95_range",
    "entity_len_1",
    "entity_len_2",
    "entity_len_3",
    "entity_len_4",
    "entity_len_5+",
    "mentions",
    "mentions/1k",
    "mention_len_max",
    "mention_len_avg",
    "mention_len_0",
    "mention_len_1",
    "mention_len_2",
    "mention_len_3",
    "mention_len_4",
    "mention_len_5+",
    "w/empty",
    "w/gap",
    "non-tree",
];

/// Statistics table; the trailing columns give the head UPOS distribution
/// over every tag seen in any row.
pub fn stats_tsv(rows: &[(String, CorpusStats)]) -> String {
    let tags: std::collections::BTreeSet<&str> =
        rows.iter().flat_map(|(_, s)| s.mentions.head_upos_distribution.keys().map(String::as_str)).collect();
    let mut out = STATS_HEADER.join("\t");
    for t in &tags {
        let _ = write!(out, "\thead_{t}");
    }
    out.push('\n');
    for (name, s) in rows {
        let e = &s.entities;
        let m = &s.mentions;
        let mut cells = vec![
            name.clone(),
            s.docs.to_string(),
            s.sentences.to_string(),
            s.words.to_string(),
            s.empty_nodes.to_string(),
            e.total.to_string(),
            format!("{:.0}", e.per_1k_words),
            e.max_length.to_string(),
            format!("{:.1}", e.avg_length),
            e.p95_range.map_or_else(|| "-".to_string(), |p| p.to_string()),
        ];
        cells.extend(e.length_histogram.iter().map(u64::to_string));
        cells.extend([
            m.total.to_string(),
            format!("{:.0}", m.per_1k_words),
            m.max_length.to_string(),
            format!("{:.1}", m.avg_length),
        ]);
        cells.extend(m.length_histogram.iter().map(u64::to_string));
        cells.extend([m.pct_with_empty, m.pct_with_gap, m.pct_non_treelet].iter().map(|p| format!("{p:.1}")));
        for t in &tags {
            cells.push(format!("{:.1}", m.head_upos_distribution.get(*t).copied().unwrap_or(0.0)));
        }
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

pub fn curve_tsv(points: &[RangeCurvePoint]) -> String {
    let mut out = String::from("window\tp95_range\tconll_f1\ttokens\tdocuments\n");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}\t{:.1}\t{}\t{}\t{}",
            i + 1,
            p.window_p95_range,
            pct(p.mean_conll_f1),
            p.window_tokens,
            p.documents
        );
    }
    out
}

/// UPOS-factorized CoNLL F1; degenerate cells read `-`.
pub fn upos_tsv(tags: &[String], rows: &[(String, Vec<Option<f64>>)]) -> String {
    let mut out = String::from("dataset");
    for t in tags {
        let _ = write!(out, "\t{t}");
    }
    out.push('\n');
    for (name, cells) in rows {
        out.push_str(name);
        for c in cells {
            match c {
                Some(f) => {
                    let _ = write!(out, "\t{}", pct(*f));
                }
                None => out.push_str("\t-"),
            }
        }
        out.push('\n');
    }
    out
}
