//! Ranking and classification metrics.
//!
//! The `*_in` variants are generic over [`Field`] so they can be evaluated exactly (e.g. over
//! `num_rational::Ratio<i64>`); the plain functions use `f64`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::RankedList;
use crate::scalar::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    /// Tallies paired (actual, predicted) outcomes, `true` being the positive class.
    pub fn from_outcomes(actual: &[bool], predicted: &[bool]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: actual.len(),
                actual: predicted.len(),
            });
        }
        let mut c = ConfusionCounts::default();
        for (&a, &p) in actual.iter().zip(predicted) {
            c.record(a, p);
        }
        Ok(c)
    }

    pub fn record(&mut self, actual: bool, predicted: bool) {
        match (actual, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn merge(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
            tn: self.tn + other.tn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f_measure: T,
}

fn ratio<T: Field>(num: u64, den: u64) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::from_count(num) / T::from_count(den)
    }
}

/// Precision, recall and their harmonic mean; each is `0` when its denominator is `0`.
pub fn prf_in<T: Field>(counts: &ConfusionCounts) -> Prf<T> {
    let precision: T = ratio(counts.tp, counts.tp + counts.fp);
    let recall: T = ratio(counts.tp, counts.tp + counts.fn_);
    let sum = precision + recall;
    let f_measure = if sum == T::zero() {
        T::zero()
    } else {
        let two = T::one() + T::one();
        two * precision * recall / sum
    };
    Prf {
        precision,
        recall,
        f_measure,
    }
}

pub fn prf(counts: &ConfusionCounts) -> MetricReport {
    let p = prf_in::<f64>(counts);
    MetricReport {
        precision: Some(p.precision),
        recall: Some(p.recall),
        f_measure: Some(p.f_measure),
        confusion: Some(*counts),
        ..MetricReport::default()
    }
}

/// Fraction of the top `k` entries labelled relevant.
pub fn accuracy_at_k_in<F: Field, T>(ranked: &RankedList<T>, labels: &HashMap<String, bool>, k: usize) -> Result<F> {
    if k == 0 {
        return Err(Error::Config("K must be at least 1".into()));
    }
    if k > ranked.len() {
        return Err(Error::Data(format!("K = {k} exceeds the {} ranked items", ranked.len())));
    }
    let mut relevant = 0u64;
    for e in &ranked.entries[..k] {
        match labels.get(&e.id) {
            Some(true) => relevant += 1,
            Some(false) => {}
            None => return Err(Error::MissingLabel(e.id.clone())),
        }
    }
    Ok(F::from_count(relevant) / F::from_count(k as u64))
}

pub fn accuracy_at_k<T>(ranked: &RankedList<T>, labels: &HashMap<String, bool>, k: usize) -> Result<f64> {
    accuracy_at_k_in(ranked, labels, k)
}

/// Cohen's kappa between two raters' labels. When chance agreement is total (`p_e = 1`) the
/// result is `1` for perfect observed agreement and `0` otherwise.
pub fn cohen_kappa_in<F: Field, L: Ord>(a: &[L], b: &[L]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Data("kappa needs at least one rated item".into()));
    }
    let n = F::from_count(a.len() as u64);
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as u64;
    let p_o = F::from_count(agree) / n;
    let mut marginals: BTreeMap<&L, (u64, u64)> = BTreeMap::new();
    for x in a {
        marginals.entry(x).or_default().0 += 1;
    }
    for y in b {
        marginals.entry(y).or_default().1 += 1;
    }
    let p_e = marginals.values().fold(F::zero(), |acc, &(ca, cb)| {
        acc + (F::from_count(ca) / n) * (F::from_count(cb) / n)
    });
    if p_e == F::one() {
        return Ok(if p_o == F::one() { F::one() } else { F::zero() });
    }
    Ok((p_o - p_e) / (F::one() - p_e))
}

pub fn cohen_kappa<L: Ord>(a: &[L], b: &[L]) -> Result<f64> {
    cohen_kappa_in(a, b)
}

/// Metrics emitted by the ranking, classification and agreement commands. Absent fields are
/// omitted from both serializations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_at_k: Option<BTreeMap<usize, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_measure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl MetricReport {
    /// `key = value` lines in a fixed order.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        if let Some(acc) = &self.accuracy_at_k {
            for (k, v) in acc {
                let _ = writeln!(out, "accuracy@{k} = {v}");
            }
        }
        for (key, value) in [
            ("precision", self.precision),
            ("recall", self.recall),
            ("f_measure", self.f_measure),
        ] {
            if let Some(v) = value {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        if let Some(c) = &self.confusion {
            let _ = writeln!(out, "tp = {}\nfp = {}\nfn = {}\ntn = {}", c.tp, c.fp, c.fn_, c.tn);
        }
        if let Some(k) = self.kappa {
            let _ = writeln!(out, "kappa = {k}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
