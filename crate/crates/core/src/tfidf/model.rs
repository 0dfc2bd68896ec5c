use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::porter::porter_stem;
use super::stopwords::is_stopword;
use crate::error::{Error, Result};
use crate::ingest::CleanSentence;
use crate::ranking::{Aggregation, QuerySet, RankedList};

/// Stopword removal followed by stemming.
pub fn analyze<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| !is_stopword(t))
        .map(porter_stem)
        .collect()
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Sorts by index; duplicate indices are summed.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => entries.push((i, w)),
            }
        }
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    /// Cosine similarity; `0` if either vector is empty or zero.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom < crate::vectorize::ZERO_NORM {
            return 0.0;
        }
        (self.dot(other) / denom).clamp(-1.0, 1.0)
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }
}

/// Fitted tf-idf vocabulary with smooth idf `ln((1 + n_docs) / (1 + df)) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<u64>,
    idf: Vec<f64>,
    n_docs: usize,
}

pub fn smooth_idf(n_docs: usize, df: u64) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

impl TfidfModel {
    /// Each sentence is one document. Terms are ordered lexicographically.
    pub fn fit<'a, I>(corpus: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CleanSentence>,
    {
        let mut df: BTreeMap<String, u64> = BTreeMap::new();
        let mut n_docs = 0usize;
        for doc in corpus {
            n_docs += 1;
            let distinct: BTreeSet<String> = analyze(&doc.tokens).into_iter().collect();
            for term in distinct {
                *df.entry(term).or_default() += 1;
            }
        }
        if df.is_empty() {
            return Err(Error::Data("tf-idf vocabulary is empty".into()));
        }
        let terms: Vec<String> = df.keys().cloned().collect();
        let df: Vec<u64> = df.into_values().collect();
        let idf = df.iter().map(|&d| smooth_idf(n_docs, d)).collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(TfidfModel {
            terms,
            index,
            df,
            idf,
            n_docs,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn df(&self) -> &[u64] {
        &self.df
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw term count times idf, L2-normalized. Unknown terms are ignored.
    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let pairs = analyze(tokens)
            .iter()
            .filter_map(|t| self.term_index(t))
            .map(|i| (i, 1.0))
            .collect();
        let mut v = SparseVector::from_pairs(pairs);
        for (i, w) in &mut v.entries {
            *w *= self.idf[*i];
        }
        let norm = v.norm();
        if norm > 0.0 {
            v.entries.iter_mut().for_each(|(_, w)| *w /= norm);
        }
        v
    }
}

/// Ranks texts by aggregated tf-idf cosine to the query sentences. Texts with an empty tf-idf
/// vector are degenerate and rank last.
pub fn rank_tfidf(
    tweets: &[CleanSentence],
    query: &QuerySet,
    model: &TfidfModel,
    aggregation: Aggregation,
) -> Result<RankedList<f64>> {
    if query.is_empty() {
        return Err(Error::Data("empty query set".into()));
    }
    let queries: Vec<SparseVector> = query.sentences.iter().map(|s| model.transform(&s.tokens)).collect();
    let scored = tweets.iter().map(|t| {
        let v = model.transform(&t.tokens);
        let s = (!v.is_empty())
            .then(|| aggregation.apply(queries.iter().map(|q| v.cosine(q))))
            .flatten();
        (t.origin_id.clone(), s)
    });
    Ok(RankedList::from_scores(scored, aggregation))
}
