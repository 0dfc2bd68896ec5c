use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ingest::CleanSentence;

/// Word list with dense indices `0..len()`.
///
/// Built vocabularies are ordered by descending corpus count, ties by word. Vocabularies read
/// from a model file keep file order and carry no counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    counts: Option<Vec<u64>>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Keeps exactly the words occurring at least `min_count` times.
    pub fn build<'a, I>(sentences: I, min_count: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CleanSentence>,
    {
        let mut freq: HashMap<&'a str, u64> = HashMap::new();
        let mut total = 0u64;
        for s in sentences {
            for t in &s.tokens {
                *freq.entry(t.as_str()).or_default() += 1;
                total += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = freq
            .into_iter()
            .filter(|&(_, c)| c >= min_count as u64)
            .collect();
        if kept.is_empty() {
            return Err(Error::CorpusTooSmall { min_count });
        }
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let words: Vec<String> = kept.iter().map(|(w, _)| w.to_string()).collect();
        let counts = kept.iter().map(|&(_, c)| c).collect();
        Ok(Vocabulary {
            index: index_of(&words),
            words,
            counts: Some(counts),
            total_tokens: total,
        })
    }

    /// Vocabulary without counts, in the given order. Duplicate words are rejected.
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let index = index_of(&words);
        if index.len() != words.len() {
            return Err(Error::Data("duplicate word in vocabulary".into()));
        }
        Ok(Vocabulary {
            words,
            index,
            counts: None,
            total_tokens: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, index: usize) -> Option<u64> {
        self.counts.as_ref().map(|c| c[index])
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    /// Number of tokens in the corpus the vocabulary was built from, OOV included.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Indices of the lowest-frequency tenth of the vocabulary (at least one word).
    ///
    /// Without counts, file order is taken as descending frequency, the word2vec convention.
    pub fn low_frequency_decile(&self) -> Vec<usize> {
        let n = self.len();
        let take = n.div_ceil(10).max(1).min(n);
        let mut order: Vec<usize> = (0..n).collect();
        if let Some(counts) = &self.counts {
            // stable: equal counts keep index order
            order.sort_by_key(|&i| std::cmp::Reverse(counts[i]));
        }
        order[n - take..].to_vec()
    }
}

fn index_of(words: &[String]) -> HashMap<String, usize> {
    words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect()
}
