use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::clusters::{blanc_counts, bcubed_counts, ceaf_e_counts, lea_counts, muc_counts, BlancCounts, KeyedClusters};
use super::mention::{md_h_counts, mor_counts, zero_counts, MentionTable};
use super::{Counts, MetricId, SingletonMode, PRF};
use crate::matching::{build_alignment, MatchRegime, TokenMismatch, ZeroWeight};
use crate::model::{Corpus, Document, Entity};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScoreConfig {
    pub regime: MatchRegime,
    pub singletons: SingletonMode,
    pub zero_weights: ZeroWeight,
}

impl ScoreConfig {
    /// Head match without singletons: the primary setting.
    pub fn primary() -> Self {
        ScoreConfig::default()
    }

    /// The primary setting followed by the three alternative CoNLL variants:
    /// partial and exact match without singletons, head match with them.
    pub fn variants(zero_weights: ZeroWeight) -> [(&'static str, ScoreConfig); 4] {
        let c = |regime, singletons| ScoreConfig { regime, singletons, zero_weights };
        [
            ("head-excl", c(MatchRegime::Head, SingletonMode::Excluded)),
            ("partial-excl", c(MatchRegime::Partial, SingletonMode::Excluded)),
            ("exact-excl", c(MatchRegime::Exact, SingletonMode::Excluded)),
            ("head-incl", c(MatchRegime::Head, SingletonMode::Included)),
        ]
    }

    pub fn label(&self) -> String {
        alloc::format!("{}-{}", self.regime.name(), self.singletons.name())
    }
}

fn apply_mode(c: &KeyedClusters, mode: SingletonMode) -> KeyedClusters {
    match mode {
        SingletonMode::Included => c.clone(),
        SingletonMode::Excluded => c.without_singletons(),
    }
}

pub fn score_muc(c: &KeyedClusters, mode: SingletonMode) -> PRF {
    muc_counts(&apply_mode(c, mode)).prf()
}

pub fn score_bcubed(c: &KeyedClusters, mode: SingletonMode) -> PRF {
    bcubed_counts(&apply_mode(c, mode)).prf()
}

pub fn score_ceaf_e(c: &KeyedClusters, mode: SingletonMode) -> PRF {
    ceaf_e_counts(&apply_mode(c, mode)).prf()
}

pub fn score_blanc(c: &KeyedClusters, mode: SingletonMode) -> PRF {
    blanc_counts(&apply_mode(c, mode)).prf()
}

pub fn score_lea(c: &KeyedClusters, mode: SingletonMode) -> PRF {
    lea_counts(&apply_mode(c, mode)).prf()
}

/// Component-wise mean of MUC, B³ and CEAF-e.
pub fn score_conll(muc: PRF, b3: PRF, ceaf_e: PRF) -> PRF {
    PRF {
        recall: (muc.recall + b3.recall + ceaf_e.recall) / 3.0,
        precision: (muc.precision + b3.precision + ceaf_e.precision) / 3.0,
        f1: (muc.f1 + b3.f1 + ceaf_e.f1) / 3.0,
    }
}

/// Summable counts for every metric.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub muc: Counts,
    pub b3: Counts,
    pub ceaf_e: Counts,
    pub blanc: BlancCounts,
    pub lea: Counts,
    pub mor: Counts,
    pub md_h: Counts,
    pub zero: Counts,
}

impl core::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Tally) {
        self.muc += o.muc;
        self.b3 += o.b3;
        self.ceaf_e += o.ceaf_e;
        self.blanc += o.blanc;
        self.lea += o.lea;
        self.mor += o.mor;
        self.md_h += o.md_h;
        self.zero += o.zero;
    }
}

impl Tally {
    pub fn conll(&self) -> PRF {
        score_conll(self.muc.prf(), self.b3.prf(), self.ceaf_e.prf())
    }

    pub fn get(&self, metric: MetricId) -> PRF {
        match metric {
            MetricId::Muc => self.muc.prf(),
            MetricId::B3 => self.b3.prf(),
            MetricId::CeafE => self.ceaf_e.prf(),
            MetricId::Conll => self.conll(),
            MetricId::Blanc => self.blanc.prf(),
            MetricId::Lea => self.lea.prf(),
            MetricId::Mor => self.mor.prf(),
            MetricId::MdH => self.md_h.prf(),
            MetricId::ZeroScore => self.zero.prf(),
        }
    }

    pub fn scores(&self) -> BTreeMap<MetricId, PRF> {
        MetricId::ALL.into_iter().map(|m| (m, self.get(m))).collect()
    }

    /// Metrics whose value relied on a 0/0 ratio.
    pub fn degenerate(&self) -> Vec<MetricId> {
        let mut out = Vec::new();
        for (m, c) in [
            (MetricId::Muc, self.muc),
            (MetricId::B3, self.b3),
            (MetricId::CeafE, self.ceaf_e),
            (MetricId::Lea, self.lea),
            (MetricId::Mor, self.mor),
            (MetricId::MdH, self.md_h),
            (MetricId::ZeroScore, self.zero),
        ] {
            if c.is_degenerate() {
                out.push(m);
            }
        }
        if self.blanc.is_degenerate() {
            out.push(MetricId::Blanc);
        }
        out.sort();
        out
    }
}

fn kept(entities: &[Entity], mode: SingletonMode) -> impl Iterator<Item = &Entity> {
    entities.iter().filter(move |e| mode == SingletonMode::Included || e.mentions.len() > 1)
}

/// Scores one document pair. Singleton entities are dropped from both sides
/// before alignment when singletons are excluded.
pub fn score_document(gold: &Document, pred: &Document, config: &ScoreConfig) -> Result<Tally, TokenMismatch> {
    let g = MentionTable::new(kept(&gold.entities, config.singletons));
    let p = MentionTable::new(kept(&pred.entities, config.singletons));
    let alignment = build_alignment(gold, pred, &g.mentions, &p.mentions, config.regime, &config.zero_weights)?;
    let clusters = KeyedClusters::new(&g.clusters, &p.clusters, &alignment, g.len(), p.len());
    Ok(Tally {
        muc: muc_counts(&clusters),
        b3: bcubed_counts(&clusters),
        ceaf_e: ceaf_e_counts(&clusters),
        blanc: blanc_counts(&clusters),
        lea: lea_counts(&clusters),
        mor: mor_counts(&g, &p, &alignment),
        md_h: md_h_counts(&g, &p),
        zero: zero_counts(&g, &p, &alignment),
    })
}

/// A 0/0 ratio encountered while scoring one document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub doc_id: String,
    pub metric: MetricId,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusScore {
    pub total: Tally,
    /// Per-document tallies in corpus order.
    pub documents: Vec<(String, Tally)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CorpusScore {
    pub fn scores(&self) -> BTreeMap<MetricId, PRF> {
        self.total.scores()
    }
}

/// Scores a dataset: documents are paired by position and must carry the
/// same ids and tokens.
pub fn score_corpus(gold: &Corpus, pred: &Corpus, config: &ScoreConfig) -> Result<CorpusScore, TokenMismatch> {
    if gold.documents.len() != pred.documents.len() {
        let doc_id = gold
            .documents
            .get(pred.documents.len())
            .or_else(|| pred.documents.get(gold.documents.len()))
            .map(|d| d.doc_id.clone())
            .unwrap_or_default();
        return Err(TokenMismatch {
            doc_id,
            detail: alloc::format!("{} gold documents vs {} predicted", gold.documents.len(), pred.documents.len()),
        });
    }
    let mut out = CorpusScore::default();
    for (g, p) in gold.documents.iter().zip(&pred.documents) {
        let tally = score_document(g, p, config)?;
        out.total += tally;
        out.diagnostics
            .extend(tally.degenerate().into_iter().map(|metric| Diagnostic { doc_id: g.doc_id.clone(), metric }));
        out.documents.push((g.doc_id.clone(), tally));
    }
    Ok(out)
}
