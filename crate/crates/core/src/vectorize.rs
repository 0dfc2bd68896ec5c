//! Sentence vectors by averaging word embeddings, and cosine similarity.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// How out-of-vocabulary tokens enter the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OovPolicy {
    /// Skip the token.
    #[default]
    Ignore,
    /// Count the token with a zero vector.
    ZeroVector,
    /// Count the token with the mean vector of the lowest-frequency tenth of the vocabulary.
    LowFreqAverage,
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ignore" => Ok(OovPolicy::Ignore),
            "zero" => Ok(OovPolicy::ZeroVector),
            "lowfreq" => Ok(OovPolicy::LowFreqAverage),
            _ => Err(Error::Config(format!("unknown oov policy {s:?} (ignore|zero|lowfreq)"))),
        }
    }
}

impl OovPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            OovPolicy::Ignore => "ignore",
            OovPolicy::ZeroVector => "zero",
            OovPolicy::LowFreqAverage => "lowfreq",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVector<T> {
    pub values: Vec<T>,
    /// Tokens found in the vocabulary.
    pub n_in_vocab: usize,
    /// No token contributed; `values` is all zeros.
    pub degenerate: bool,
}

impl<T: Real> SentenceVector<T> {
    pub fn from_values(values: Vec<T>) -> Self {
        SentenceVector {
            values,
            n_in_vocab: 1,
            degenerate: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> T {
        dot(&self.values, &self.values).sqrt()
    }
}

/// Averages token vectors with a fixed summation order (ascending vocabulary index, OOV
/// contributions last) so the result does not depend on token order.
#[derive(Debug, Clone)]
pub struct Vectorizer<'m, T> {
    model: &'m EmbeddingModel<T>,
    policy: OovPolicy,
    low_freq_mean: Option<Vec<T>>,
}

impl<'m, T: Real> Vectorizer<'m, T> {
    pub fn new(model: &'m EmbeddingModel<T>, policy: OovPolicy) -> Self {
        let low_freq_mean = (policy == OovPolicy::LowFreqAverage).then(|| model.low_frequency_mean());
        Vectorizer {
            model,
            policy,
            low_freq_mean,
        }
    }

    pub fn model(&self) -> &'m EmbeddingModel<T> {
        self.model
    }

    pub fn policy(&self) -> OovPolicy {
        self.policy
    }

    pub fn vectorize<S: AsRef<str>>(&self, tokens: &[S]) -> SentenceVector<T> {
        let dim = self.model.dim();
        let mut known: Vec<usize> = Vec::with_capacity(tokens.len());
        let mut oov = 0usize;
        for t in tokens {
            match self.model.vocab().get(t.as_ref()) {
                Some(i) => known.push(i),
                None => oov += 1,
            }
        }
        known.sort_unstable();
        let mut sum = vec![T::zero(); dim];
        for &i in &known {
            for (s, &x) in sum.iter_mut().zip(self.model.vector_at(i)) {
                *s = *s + x;
            }
        }
        let oov_counted = match self.policy {
            OovPolicy::Ignore => 0,
            OovPolicy::ZeroVector => oov,
            OovPolicy::LowFreqAverage => {
                let mean = self.low_freq_mean.as_ref().expect("computed for this policy");
                for _ in 0..oov {
                    for (s, &x) in sum.iter_mut().zip(mean) {
                        *s = *s + x;
                    }
                }
                oov
            }
        };
        let n = known.len() + oov_counted;
        if n == 0 {
            return SentenceVector {
                values: sum,
                n_in_vocab: 0,
                degenerate: true,
            };
        }
        let denom = T::lit(n as f64);
        sum.iter_mut().for_each(|s| *s = *s / denom);
        SentenceVector {
            values: sum,
            n_in_vocab: known.len(),
            degenerate: false,
        }
    }
}

/// Convenience wrapper over [`Vectorizer`] for a single sentence.
pub fn vectorize<T: Real, S: AsRef<str>>(
    tokens: &[S],
    model: &EmbeddingModel<T>,
    policy: OovPolicy,
) -> SentenceVector<T> {
    Vectorizer::new(model, policy).vectorize(tokens)
}

/// Norms below this are treated as zero by [`cosine`].
pub const ZERO_NORM: f64 = 1e-12;

/// Cosine similarity of two slices; `0` when either norm is below [`ZERO_NORM`].
pub fn cosine_slices<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    let eps = T::lit(ZERO_NORM);
    if na < eps || nb < eps {
        return Ok(T::zero());
    }
    let c = dot(a, b) / (na * nb);
    Ok(c.max(-T::one()).min(T::one()))
}

pub fn cosine<T: Real>(a: &SentenceVector<T>, b: &SentenceVector<T>) -> Result<T> {
    cosine_slices(&a.values, &b.values)
}
