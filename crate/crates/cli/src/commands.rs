use std::path::Path;

use corefud_core::analysis::{
    document_ranges, long_range_curve, sample_split, upos_factorized_score, DocumentRange, EntityFilter, FactorLevel,
    StatsAccumulator,
};
use corefud_core::formats::{
    clean_output, from_json, from_plaintext, reconstruct_conllu, strip_annotations, to_json, to_plaintext, CleanerConfig,
    FormatError, JsonDoc,
};
use corefud_core::metrics::{aggregate, score_corpus, Diagnostic};
use corefud_core::model::serialize_conllu;
use corefud_core::{Corpus, ScoreConfig};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::io::{emit, prepare_out_dir, read_corpus, read_text, write_file};
use crate::manifest::Dataset;
use crate::{render, Direction, Settings};

fn warn_all(path: &Path, warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
}

/// Runs `f` on every dataset in the pool; results keep manifest order and
/// the first error in that order wins.
fn per_dataset<T: Send>(
    sets: &[Dataset],
    pool: &rayon::ThreadPool,
    f: impl Fn(&Dataset) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    pool.install(|| sets.par_iter().map(&f).collect::<Vec<_>>()).into_iter().collect()
}

fn gold_and_pred(d: &Dataset) -> Result<(Corpus, Corpus, &Path)> {
    let pred_path = d.pred.as_deref().expect("datasets are checked for predictions");
    Ok((read_corpus(&d.gold)?, read_corpus(pred_path)?, pred_path))
}

struct DatasetScores {
    primary: std::collections::BTreeMap<corefud_core::MetricId, corefud_core::PRF>,
    diagnostics: Vec<Diagnostic>,
    variants: Vec<f64>,
}

pub fn score(sets: &[Dataset], settings: &Settings, pool: &rayon::ThreadPool, out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        prepare_out_dir(dir)?;
    }
    let variants = ScoreConfig::variants(settings.score.zero_weights);
    let results = per_dataset(sets, pool, |d| {
        let (gold, pred, pred_path) = gold_and_pred(d)?;
        let primary = score_corpus(&gold, &pred, &settings.score).map_err(|e| CliError::mismatch(pred_path, e))?;
        let variant_f1 = variants
            .iter()
            .map(|(_, config)| {
                score_corpus(&gold, &pred, config)
                    .map(|s| s.total.conll().f1)
                    .map_err(|e| CliError::mismatch(pred_path, e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DatasetScores { primary: primary.scores(), diagnostics: primary.diagnostics, variants: variant_f1 })
    })?;

    let mut per = Vec::new();
    let mut diagnostics = Vec::new();
    let mut variant_rows = Vec::new();
    for (d, r) in sets.iter().zip(results) {
        per.push((d.name.clone(), r.primary));
        diagnostics.push((d.name.clone(), r.diagnostics));
        variant_rows.push((d.name.clone(), r.variants));
    }
    let report = aggregate(per, settings.score.singletons, settings.score.regime)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let labels: Vec<&str> = variants.iter().map(|(l, _)| *l).collect();
    let scores = report.to_tsv();
    let variants_table = render::variants_tsv(&labels, &variant_rows);
    match out {
        Some(dir) => {
            write_file(&dir.join("scores.tsv"), &scores)?;
            write_file(&dir.join("variants.tsv"), &variants_table)?;
            write_file(&dir.join("scores.jsonl"), &render::scores_jsonl(&report, &settings.score, &diagnostics))?;
        }
        None => print!("{scores}\n{variants_table}"),
    }
    Ok(())
}

fn need_skeleton(skeleton: Option<&Path>) -> Result<&Path> {
    let path = skeleton.ok_or_else(|| CliError::Config("this direction needs --skeleton".into()))?;
    crate::io::check_inputs([&path.to_path_buf()])?;
    Ok(path)
}

fn count_check(path: &Path, what: &str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            message: format!("{found} {what} for {expected} reference documents"),
        });
    }
    Ok(())
}

/// Adds a line number to input errors raised for one line of a text file.
fn at_line(path: &Path, line: usize, e: FormatError) -> CliError {
    match CliError::format(path, e) {
        CliError::Input { path, message } => CliError::Input { path, message: format!("line {line}: {message}") },
        other => other,
    }
}

fn text_lines(text: &str) -> Vec<&str> {
    text.lines().collect()
}

pub fn convert(direction: Direction, input: &Path, skeleton: Option<&Path>, output: &Path) -> Result<()> {
    crate::io::check_inputs([&input.to_path_buf()])?;
    let rendered = match direction {
        Direction::ToText => {
            let corpus = read_corpus(input)?;
            let mut out = String::new();
            for doc in &corpus.documents {
                let c = to_plaintext(doc);
                warn_all(input, &c.warnings);
                out.push_str(&c.value.render());
                out.push('\n');
            }
            out
        }
        Direction::ToJson => {
            let corpus = read_corpus(input)?;
            let docs: Vec<JsonDoc> = corpus
                .documents
                .iter()
                .map(|doc| {
                    let c = to_json(doc);
                    warn_all(input, &c.warnings);
                    c.value
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&docs).expect("JSON documents serialize");
            s.push('\n');
            s
        }
        Direction::ToInput => {
            let corpus = read_corpus(input)?;
            serialize_conllu(&Corpus { documents: corpus.documents.iter().map(strip_annotations).collect() })
        }
        Direction::FromText => {
            let skel_path = need_skeleton(skeleton)?;
            let skel = read_corpus(skel_path)?;
            let text = read_text(input)?;
            let lines = text_lines(&text);
            count_check(input, "lines", lines.len(), skel.documents.len())?;
            let mut documents = Vec::new();
            for (i, (line, doc)) in lines.iter().zip(&skel.documents).enumerate() {
                let plain = from_plaintext(line).map_err(|e| at_line(input, i + 1, e.into()))?;
                let c = reconstruct_conllu(doc, &plain).map_err(|e| at_line(input, i + 1, e))?;
                warn_all(input, &c.warnings);
                documents.push(c.value);
            }
            serialize_conllu(&Corpus { documents })
        }
        Direction::FromJson => {
            let skel_path = need_skeleton(skeleton)?;
            let skel = read_corpus(skel_path)?;
            let text = read_text(input)?;
            let docs: Vec<JsonDoc> = serde_json::from_str(&text)
                .map_err(|e| CliError::Input { path: input.to_path_buf(), message: e.to_string() })?;
            count_check(input, "JSON documents", docs.len(), skel.documents.len())?;
            let mut documents = Vec::new();
            for (i, (j, doc)) in docs.iter().zip(&skel.documents).enumerate() {
                let c = from_json(j, doc).map_err(|e| match CliError::format(input, e) {
                    CliError::Input { path, message } => {
                        CliError::Input { path, message: format!("document {} ({}): {message}", i + 1, j.doc_id) }
                    }
                    other => other,
                })?;
                warn_all(input, &c.warnings);
                documents.push(c.value);
            }
            serialize_conllu(&Corpus { documents })
        }
    };
    write_file(output, &rendered)
}

pub fn clean(
    reference: &Path,
    noisy: &Path,
    output: &Path,
    conllu: Option<&Path>,
    config: &CleanerConfig,
) -> Result<()> {
    crate::io::check_inputs([&reference.to_path_buf(), &noisy.to_path_buf()])?;
    let corpus = read_corpus(reference)?;
    let text = read_text(noisy)?;
    let lines = text_lines(&text);
    count_check(noisy, "lines", lines.len(), corpus.documents.len())?;
    let mut plain = String::new();
    let mut documents = Vec::new();
    for (i, (line, doc)) in lines.iter().zip(&corpus.documents).enumerate() {
        let c = clean_output(doc, line, config).map_err(|e| at_line(noisy, i + 1, e))?;
        warn_all(noisy, &c.warnings);
        plain.push_str(&c.value.doc.render());
        plain.push('\n');
        if conllu.is_some() {
            let r = reconstruct_conllu(doc, &c.value.doc).map_err(|e| at_line(noisy, i + 1, e))?;
            warn_all(noisy, &r.warnings);
            documents.push(r.value);
        }
    }
    write_file(output, &plain)?;
    if let Some(path) = conllu {
        write_file(path, &serialize_conllu(&Corpus { documents }))?;
    }
    Ok(())
}

pub fn stats(
    sets: &[Dataset],
    filter: EntityFilter,
    pred_side: bool,
    pool: &rayon::ThreadPool,
    out: Option<&Path>,
) -> Result<()> {
    if let Some(dir) = out {
        prepare_out_dir(dir)?;
    }
    let accs = per_dataset(sets, pool, |d| {
        let path = if pred_side { d.pred.as_deref().expect("checked") } else { &d.gold };
        let mut acc = StatsAccumulator::new(filter);
        acc.add_corpus(&read_corpus(path)?);
        Ok(acc)
    })?;
    let mut rows: Vec<_> = sets.iter().zip(&accs).map(|(d, a)| (d.name.clone(), a.finish())).collect();
    if accs.len() > 1 {
        let mut total = StatsAccumulator::new(filter);
        for a in &accs {
            total.merge(a);
        }
        rows.push(("total".to_string(), total.finish()));
    }
    emit(out.map(|d| d.join("stats.tsv")).as_deref(), &render::stats_tsv(&rows))
}

pub fn long_range(sets: &[Dataset], settings: &Settings, pool: &rayon::ThreadPool, out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        prepare_out_dir(dir)?;
    }
    let per = per_dataset(sets, pool, |d| {
        let (gold, pred, pred_path) = gold_and_pred(d)?;
        document_ranges(&gold, &pred, &settings.score).map_err(|e| CliError::mismatch(pred_path, e))
    })?;
    let mut docs_table = String::from("dataset\tdocument\twords\tp95_range\tmax_gap\tconll_f1\n");
    let mut all: Vec<DocumentRange> = Vec::new();
    for (d, ranges) in sets.iter().zip(per) {
        for r in &ranges {
            let opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
            docs_table.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{:.2}\n",
                d.name,
                r.doc_id,
                r.words,
                opt(r.p95_range),
                opt(r.max_adjacent_gap),
                100.0 * r.conll_f1
            ));
        }
        all.extend(ranges);
    }
    let curve = render::curve_tsv(&long_range_curve(&all, &settings.curve));
    match out {
        Some(dir) => {
            write_file(&dir.join("curve.tsv"), &curve)?;
            write_file(&dir.join("documents.tsv"), &docs_table)
        }
        None => emit(None, &curve),
    }
}

pub fn upos(
    sets: &[Dataset],
    settings: &Settings,
    level: FactorLevel,
    tags: &[String],
    pool: &rayon::ThreadPool,
    out: Option<&Path>,
) -> Result<()> {
    if let Some(dir) = out {
        prepare_out_dir(dir)?;
    }
    let rows = per_dataset(sets, pool, |d| {
        let (gold, pred, pred_path) = gold_and_pred(d)?;
        let cells = tags
            .iter()
            .map(|tag| {
                upos_factorized_score(&gold, &pred, tag, level, &settings.score)
                    .map(|s| (!s.degenerate).then_some(s.conll.f1))
                    .map_err(|e| CliError::mismatch(pred_path, e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((d.name.clone(), cells))
    })?;
    emit(out.map(|d| d.join("upos.tsv")).as_deref(), &render::upos_tsv(tags, &rows))
}

/// Samples each dataset into its target file; exempt datasets are copied
/// byte for byte.
pub fn sample(sets: &[Dataset], targets: &[std::path::PathBuf], settings: &Settings) -> Result<()> {
    for (d, target) in sets.iter().zip(targets) {
        if d.exempt {
            let bytes = std::fs::read(&d.gold).map_err(|e| CliError::io(&d.gold, e))?;
            if let Some(dir) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(target, bytes).map_err(|e| CliError::io(target, e))?;
            continue;
        }
        let corpus = read_corpus(&d.gold)?;
        let sampled = sample_split(&corpus, settings.cap_words, false, settings.seed);
        for w in &sampled.warnings {
            eprintln!("warning: {}: {w}", d.gold.display());
        }
        write_file(target, &serialize_conllu(&sampled.corpus))?;
    }
    Ok(())
}
