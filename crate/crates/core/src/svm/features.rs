use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::scalar::Real;

/// Words occurring in at least two training comments, in lexicographic order. No stemming or
/// stopword removal is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NtfVocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

pub const NTF_MIN_DOCUMENT_FREQUENCY: usize = 2;

impl NtfVocabulary {
    pub fn build<S: AsRef<str>>(comments: &[&[S]]) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for comment in comments {
            let distinct: BTreeSet<&str> = comment.iter().map(AsRef::as_ref).collect();
            for w in distinct {
                *df.entry(w).or_default() += 1;
            }
        }
        let words: Vec<String> = df
            .into_iter()
            .filter(|&(_, d)| d >= NTF_MIN_DOCUMENT_FREQUENCY)
            .map(|(w, _)| w.to_string())
            .collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        NtfVocabulary { words, index }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Per-word counts divided by the comment's total token count.
pub fn normalized_tf_features<T: Real, S: AsRef<str>>(tokens: &[S], vocab: &NtfVocabulary) -> Vec<T> {
    let mut out = vec![T::zero(); vocab.len()];
    if tokens.is_empty() {
        return out;
    }
    let total = T::lit(tokens.len() as f64);
    for t in tokens {
        if let Some(&i) = vocab.index.get(t.as_ref()) {
            out[i] = out[i] + T::one();
        }
    }
    out.iter_mut().for_each(|x| *x = *x / total);
    out
}
