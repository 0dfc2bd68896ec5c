use super::matrix::Matrix;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// Trained (or loaded) word embeddings: one `dim`-length vector per vocabulary word.
///
/// Immutable once built; share across threads by reference.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel<T> {
    vocab: Vocabulary,
    vectors: Matrix<T>,
}

impl<T: Real> EmbeddingModel<T> {
    pub fn new(vocab: Vocabulary, vectors: Matrix<T>) -> Result<Self> {
        if vocab.len() != vectors.rows() {
            return Err(Error::Invariant(format!(
                "{} words but {} vectors",
                vocab.len(),
                vectors.rows()
            )));
        }
        if vectors.cols() == 0 {
            return Err(Error::Data("embedding dimension must be positive".into()));
        }
        if let Some(i) = vectors.as_slice().iter().position(|x| !x.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value for word {:?}",
                vocab.word(i / vectors.cols())
            )));
        }
        Ok(EmbeddingModel { vocab, vectors })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vocab.get(word).map(|i| self.vectors.row(i))
    }

    pub fn vector_at(&self, index: usize) -> &[T] {
        self.vectors.row(index)
    }

    /// Same vocabulary, every component transformed by `f`.
    pub fn map_vectors(&self, f: impl Fn(T) -> T) -> Self {
        EmbeddingModel {
            vocab: self.vocab.clone(),
            vectors: self.vectors.map(f),
        }
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> EmbeddingModel<U> {
        EmbeddingModel {
            vocab: self.vocab.clone(),
            vectors: self.vectors.map(|x| U::lit(x.as_f64())),
        }
    }

    /// Mean vector of the lowest-frequency tenth of the vocabulary.
    pub fn low_frequency_mean(&self) -> Vec<T> {
        let rows = self.vocab.low_frequency_decile();
        let mut mean = vec![T::zero(); self.dim()];
        for &r in &rows {
            for (m, &x) in mean.iter_mut().zip(self.vectors.row(r)) {
                *m = *m + x;
            }
        }
        let n = T::lit(rows.len() as f64);
        mean.iter_mut().for_each(|m| *m = *m / n);
        mean
    }

    /// The `k` words most cosine-similar to `word`, excluding itself. Ties go to the lower
    /// vocabulary index.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, T)>> {
        let query = self
            .vocab
            .get(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let norms: Vec<T> = self.vectors.iter_rows().map(|r| dot(r, r).sqrt()).collect();
        let q = self.vectors.row(query);
        let mut scored: Vec<(usize, T)> = (0..self.len())
            .filter(|&i| i != query)
            .map(|i| {
                let denom = norms[i] * norms[query];
                let cos = if denom > T::zero() {
                    dot(q, self.vectors.row(i)) / denom
                } else {
                    T::zero()
                };
                (i, cos)
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite cosine").then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(i, c)| (self.vocab.word(i).to_string(), c))
            .collect())
    }
}
