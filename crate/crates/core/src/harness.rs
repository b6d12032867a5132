//! Precision, recall and F1 of mining results against expected instances.
//!
//! A pattern instance is identified by the IRI bound to the anchor variable;
//! many result rows may describe the same instance.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::rdf::Term;
use crate::sparql::ResultSet;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid ground truth: {0}")]
    Json(#[from] serde_json::Error),
    #[error("ground truth for `{0}` lists no expected instances")]
    EmptyExpected(String),
    #[error("anchor variable ?{anchor} is not among the result columns {header:?}")]
    MissingAnchor { anchor: String, header: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GroundTruth {
    pub pattern: String,
    pub anchor_var: String,
    pub expected: BTreeSet<String>,
}

impl GroundTruth {
    /// Parses and rejects an empty `expected` set, for which recall is undefined.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let t: GroundTruth = serde_json::from_str(text)?;
        if t.expected.is_empty() {
            return Err(HarnessError::EmptyExpected(t.pattern));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub pattern: String,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// False when nothing was detected; `precision` is then reported as 1.0.
    pub precision_defined: bool,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn anchor_key(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.clone(),
        other => other.to_string(),
    }
}

pub fn score(results: &ResultSet, truth: &GroundTruth) -> Result<EvalReport, HarnessError> {
    let col = results
        .column(&truth.anchor_var)
        .ok_or_else(|| HarnessError::MissingAnchor {
            anchor: truth.anchor_var.clone(),
            header: results.header.clone(),
        })?;
    let detected: BTreeSet<String> = results.rows.iter().map(|r| anchor_key(&r[col])).collect();
    let tp = detected.intersection(&truth.expected).count();
    let fp = detected.len() - tp;
    let fn_ = truth.expected.len() - tp;
    let precision_defined = !detected.is_empty();
    let precision = if precision_defined {
        tp as f64 / detected.len() as f64
    } else {
        1.0
    };
    let recall = if truth.expected.is_empty() {
        1.0
    } else {
        tp as f64 / truth.expected.len() as f64
    };
    Ok(EvalReport {
        pattern: truth.pattern.clone(),
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        precision,
        recall,
        f1: f1(precision, recall),
        precision_defined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub reports: Vec<EvalReport>,
    pub mean_precision: f64,
    pub mean_recall: f64,
}

/// Unweighted means over patterns.
pub fn aggregate(reports: &[EvalReport]) -> Summary {
    let n = reports.len().max(1) as f64;
    Summary {
        reports: reports.to_vec(),
        mean_precision: reports.iter().map(|r| r.precision).sum::<f64>() / n,
        mean_recall: reports.iter().map(|r| r.recall).sum::<f64>() / n,
    }
}

impl Summary {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let w = self
            .reports
            .iter()
            .map(|r| r.pattern.len())
            .chain([7])
            .max()
            .unwrap();
        writeln!(out, "{:<w$}  {:>4} {:>4} {:>4}  {:>9} {:>9} {:>7}", "pattern", "TP", "FP", "FN", "precision", "recall", "F1").unwrap();
        for r in &self.reports {
            let p = format!("{:.2}%{}", r.precision * 100.0, if r.precision_defined { "" } else { "*" });
            writeln!(
                out,
                "{:<w$}  {:>4} {:>4} {:>4}  {:>9} {:>8.2}% {:>7.4}",
                r.pattern, r.true_positives, r.false_positives, r.false_negatives, p, r.recall * 100.0, r.f1
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:<w$}  {:>14}  {:>8.2}% {:>8.2}%",
            "average",
            "",
            self.mean_precision * 100.0,
            self.mean_recall * 100.0
        )
        .unwrap();
        if self.reports.iter().any(|r| !r.precision_defined) {
            out.push_str("* nothing detected; precision undefined, reported as 100%\n");
        }
        out
    }
}
