use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use super::{MetricId, SingletonMode, PRF};
use crate::matching::MatchRegime;

/// Per-dataset scores and their macro average.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    /// Datasets in input order.
    pub per_dataset: Vec<(String, BTreeMap<MetricId, PRF>)>,
    pub macro_avg: BTreeMap<MetricId, PRF>,
    pub singleton_mode: SingletonMode,
    pub regime: MatchRegime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AggregateError {
    NoDatasets,
    MissingMetric { dataset: String, metric: MetricId },
}

impl fmt::Display for AggregateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregateError::NoDatasets => f.write_str("nothing to aggregate: no datasets"),
            AggregateError::MissingMetric { dataset, metric } => {
                write!(f, "dataset {dataset:?} has no {metric} score")
            }
        }
    }
}

impl core::error::Error for AggregateError {}

/// Macro-averages every component of every metric over the datasets.
///
/// The metric set is the union over datasets; a dataset lacking one of them
/// is an error.
pub fn aggregate(
    per_dataset: Vec<(String, BTreeMap<MetricId, PRF>)>,
    singleton_mode: SingletonMode,
    regime: MatchRegime,
) -> Result<ScoreReport, AggregateError> {
    if per_dataset.is_empty() {
        return Err(AggregateError::NoDatasets);
    }
    let metrics: Vec<MetricId> = {
        let mut all: Vec<MetricId> = per_dataset.iter().flat_map(|(_, s)| s.keys().copied()).collect();
        all.sort();
        all.dedup();
        all
    };
    let n = per_dataset.len() as f64;
    let mut macro_avg = BTreeMap::new();
    for metric in metrics {
        let mut sum = PRF::ZERO;
        for (name, scores) in &per_dataset {
            let s = scores
                .get(&metric)
                .ok_or_else(|| AggregateError::MissingMetric { dataset: name.clone(), metric })?;
            sum.recall += s.recall;
            sum.precision += s.precision;
            sum.f1 += s.f1;
        }
        macro_avg.insert(metric, PRF { recall: sum.recall / n, precision: sum.precision / n, f1: sum.f1 / n });
    }
    Ok(ScoreReport { per_dataset, macro_avg, singleton_mode, regime })
}

impl ScoreReport {
    pub fn metrics(&self) -> impl Iterator<Item = MetricId> + '_ {
        self.macro_avg.keys().copied()
    }

    /// Tab-separated table with one row per dataset plus a `macro` row; each
    /// cell reads `R / P / F` in percent.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("dataset");
        for m in self.metrics() {
            let _ = write!(out, "\t{m}");
        }
        out.push('\n');
        let rows = self.per_dataset.iter().map(|(n, s)| (n.as_str(), s)).chain([("macro", &self.macro_avg)]);
        for (name, scores) in rows {
            out.push_str(name);
            for m in self.metrics() {
                let s = scores.get(&m).copied().unwrap_or(PRF::ZERO);
                let _ = write!(out, "\t{}", format_cell(s));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn format_cell(s: PRF) -> String {
    alloc::format!("{:.2} / {:.2} / {:.2}", 100.0 * s.recall, 100.0 * s.precision, 100.0 * s.f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn one(f1: f64) -> BTreeMap<MetricId, PRF> {
        [(MetricId::Conll, PRF { recall: f1, precision: f1, f1 })].into_iter().collect()
    }

    fn agg(d: Vec<(String, BTreeMap<MetricId, PRF>)>) -> Result<ScoreReport, AggregateError> {
        aggregate(d, SingletonMode::Excluded, MatchRegime::Head)
    }

    #[test]
    fn single_dataset_is_its_own_macro() {
        let r = agg(vec![("a".into(), one(0.6))]).unwrap();
        assert_eq!(r.macro_avg, one(0.6));
    }

    #[test]
    fn two_datasets_average() {
        let r = agg(vec![("a".into(), one(0.6)), ("b".into(), one(0.8))]).unwrap();
        assert!((r.macro_avg[&MetricId::Conll].f1 - 0.7).abs() < 1e-12);
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("dataset\tCoNLL\n"));
        assert!(tsv.contains("macro\t70.00 / 70.00 / 70.00"));
    }

    #[test]
    fn missing_metric_is_named() {
        let mut b = one(0.5);
        b.insert(MetricId::Muc, PRF::ZERO);
        let err = agg(vec![("a".into(), one(0.6)), ("b".into(), b)]).unwrap_err();
        assert_eq!(err, AggregateError::MissingMetric { dataset: "a".into(), metric: MetricId::Muc });
        assert!(err.to_string().contains("MUC"));
        assert_eq!(agg(vec![]).unwrap_err(), AggregateError::NoDatasets);
    }
}
