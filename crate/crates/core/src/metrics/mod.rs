//! Coreference scores computed from a [`MentionAlignment`] and the two entity
//! partitions.
//!
//! Every metric first produces additive [`Counts`] (numerators and
//! denominators for recall and precision). Counts are summed over the
//! documents of a dataset and turned into a [`PRF`] at the end, so a
//! dataset score is micro-averaged over its documents, and datasets are
//! macro-averaged by [`aggregate`].
//!
//! [`MentionAlignment`]: crate::matching::MentionAlignment

mod clusters;
mod mention;
mod report;
mod scorer;

use alloc::string::String;
use core::fmt;
use core::ops::AddAssign;

pub use clusters::{blanc_counts, bcubed_counts, ceaf_e_counts, lea_counts, muc_counts, BlancCounts, KeyedClusters, LinkCounts};
pub use mention::{md_h_counts, mor_counts, zero_counts, MentionTable};
pub use report::{aggregate, AggregateError, ScoreReport};
pub use scorer::{
    score_bcubed, score_blanc, score_ceaf_e, score_conll, score_corpus, score_document, score_lea, score_muc,
    CorpusScore, Diagnostic, ScoreConfig, Tally,
};

/// Recall, precision and F1, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PRF {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl PRF {
    pub const ZERO: PRF = PRF { recall: 0.0, precision: 0.0, f1: 0.0 };

    /// Builds the triple with `f1 = 2rp / (r + p)`, or 0 when `r + p = 0`.
    pub fn new(recall: f64, precision: f64) -> Self {
        let f1 = if recall + precision > 0.0 { 2.0 * recall * precision / (recall + precision) } else { 0.0 };
        PRF { recall, precision, f1 }
    }
}

/// Ratio with the `0/0 = 0` convention.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Additive recall/precision counts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Counts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl Counts {
    pub fn prf(&self) -> PRF {
        PRF::new(ratio(self.recall_num, self.recall_den), ratio(self.precision_num, self.precision_den))
    }

    /// True when a denominator is zero and the 0/0 convention kicked in.
    pub fn is_degenerate(&self) -> bool {
        self.recall_den <= 0.0 || self.precision_den <= 0.0
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.recall_num += o.recall_num;
        self.recall_den += o.recall_den;
        self.precision_num += o.precision_num;
        self.precision_den += o.precision_den;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricId {
    Muc,
    B3,
    CeafE,
    Conll,
    Blanc,
    Lea,
    Mor,
    MdH,
    ZeroScore,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::Muc,
        MetricId::B3,
        MetricId::CeafE,
        MetricId::Conll,
        MetricId::Blanc,
        MetricId::Lea,
        MetricId::Mor,
        MetricId::MdH,
        MetricId::ZeroScore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Muc => "MUC",
            MetricId::B3 => "B3",
            MetricId::CeafE => "CEAF-e",
            MetricId::Conll => "CoNLL",
            MetricId::Blanc => "BLANC",
            MetricId::Lea => "LEA",
            MetricId::Mor => "MOR",
            MetricId::MdH => "MD-h",
            MetricId::ZeroScore => "zero",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for MetricId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| alloc::format!("unknown metric {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SingletonMode {
    Included,
    #[default]
    Excluded,
}

impl SingletonMode {
    pub fn name(self) -> &'static str {
        match self {
            SingletonMode::Included => "include",
            SingletonMode::Excluded => "exclude",
        }
    }
}

impl core::str::FromStr for SingletonMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "include" | "included" => Ok(SingletonMode::Included),
            "exclude" | "excluded" => Ok(SingletonMode::Excluded),
            other => Err(alloc::format!("unknown singleton mode {other:?} (expected include or exclude)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_formula() {
        let p = PRF::new(0.5, 1.0);
        assert!((p.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(PRF::new(0.0, 0.0), PRF::ZERO);
    }

    #[test]
    fn zero_denominators() {
        let c = Counts::default();
        assert!(c.is_degenerate());
        assert_eq!(c.prf(), PRF::ZERO);
    }

    #[test]
    fn metric_names_roundtrip() {
        for m in MetricId::ALL {
            assert_eq!(m.name().parse::<MetricId>().unwrap(), m);
        }
    }
}
