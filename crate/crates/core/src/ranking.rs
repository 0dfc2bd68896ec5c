//! Ranking short texts by similarity to sampled source-platform sentences.

use std::io::Write;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::ingest::CleanSentence;
use crate::scalar::Real;
use crate::vectorize::{cosine, OovPolicy, SentenceVector, Vectorizer};

pub const DEFAULT_MAX_CHARS: usize = 140;
pub const DEFAULT_SAMPLE_SIZE: usize = 1000;

/// Score given to texts with no usable tokens.
pub const DEGENERATE_SCORE: f64 = -1.0;

/// Sampled anchor sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    pub sentences: Vec<CleanSentence>,
    pub max_chars: usize,
    pub sample_size: usize,
    pub seed: u64,
    /// Sentences that passed the length filter.
    pub eligible: usize,
}

/// Uniform sample without replacement of up to `sample_size` sentences with
/// `char_len <= max_chars`, drawn in one reservoir pass.
pub fn select_instances<I>(sentences: I, max_chars: usize, sample_size: usize, seed: u64) -> Result<QuerySet>
where
    I: IntoIterator<Item = CleanSentence>,
{
    if sample_size == 0 {
        return Err(Error::Config("sample_size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eligible = 0usize;
    let sample = sentences
        .into_iter()
        .filter(|s| s.char_len <= max_chars && !s.is_empty())
        .inspect(|_| eligible += 1)
        .choose_multiple(&mut rng, sample_size);
    if sample.is_empty() {
        return Err(Error::Data(format!("no sentence of at most {max_chars} characters to sample")));
    }
    Ok(QuerySet {
        sentences: sample,
        max_chars,
        sample_size,
        seed,
        eligible,
    })
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn vectors<T: Real>(&self, vectorizer: &Vectorizer<'_, T>) -> Vec<SentenceVector<T>> {
        self.sentences
            .iter()
            .map(|s| vectorizer.vectorize(&s.tokens))
            .collect()
    }
}

/// How one text's similarities to all queries collapse into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Aggregation::Max),
            "mean" => Ok(Aggregation::Mean),
            _ => Err(Error::Config(format!("unknown aggregation {s:?} (max|mean)"))),
        }
    }
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Max => "max",
            Aggregation::Mean => "mean",
        }
    }

    /// Folds similarities; `None` for an empty input.
    pub fn apply<T: Real>(self, sims: impl IntoIterator<Item = T>) -> Option<T> {
        let mut n = 0usize;
        let mut acc = T::zero();
        for s in sims {
            acc = match (self, n) {
                (_, 0) => s,
                (Aggregation::Max, _) => acc.max(s),
                (Aggregation::Mean, _) => acc + s,
            };
            n += 1;
        }
        match (self, n) {
            (_, 0) => None,
            (Aggregation::Max, _) => Some(acc),
            (Aggregation::Mean, _) => Some(acc / T::lit(n as f64)),
        }
    }
}

/// Aggregated cosine similarity of a text to every query vector; [`DEGENERATE_SCORE`] for a
/// degenerate text.
pub fn score<T: Real>(tweet: &SentenceVector<T>, queries: &[SentenceVector<T>], aggregation: Aggregation) -> Result<T> {
    if queries.is_empty() {
        return Err(Error::Data("empty query set".into()));
    }
    if tweet.degenerate {
        return Ok(T::lit(DEGENERATE_SCORE));
    }
    let sims = queries
        .iter()
        .map(|q| cosine(tweet, q))
        .collect::<Result<Vec<T>>>()?;
    Ok(aggregation.apply(sims).expect("non-empty"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntry<T> {
    /// Position of the text in the ranker's input.
    pub index: usize,
    pub id: String,
    pub score: T,
    pub degenerate: bool,
}

/// Entries sorted by descending score, ties by ascending input index, degenerate texts last.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedList<T> {
    pub entries: Vec<RankedEntry<T>>,
    pub aggregation: Aggregation,
}

impl<T> RankedList<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }
}

impl<T: Real> RankedList<T> {
    /// Sorts `(id, score)` pairs, `None` marking a degenerate text.
    pub fn from_scores<I>(scored: I, aggregation: Aggregation) -> Self
    where
        I: IntoIterator<Item = (String, Option<T>)>,
    {
        let mut entries: Vec<RankedEntry<T>> = scored
            .into_iter()
            .enumerate()
            .map(|(index, (id, s))| RankedEntry {
                index,
                id,
                score: s.unwrap_or_else(|| T::lit(DEGENERATE_SCORE)),
                degenerate: s.is_none(),
            })
            .collect();
        entries.sort_by(|a, b| {
            a.degenerate
                .cmp(&b.degenerate)
                .then_with(|| b.score.partial_cmp(&a.score).expect("finite scores"))
                .then(a.index.cmp(&b.index))
        });
        RankedList { entries, aggregation }
    }

    /// Writes `rank<TAB>id<TAB>score<TAB>text` lines, rank 1-based, score with six decimals.
    /// `text_of` maps an entry's input index to its original text.
    pub fn write_tsv<'a, W: Write>(&self, mut out: W, text_of: impl Fn(usize) -> &'a str) -> Result<()> {
        for (rank, e) in self.entries.iter().enumerate() {
            let text = text_of(e.index).replace(['\t', '\n', '\r'], " ");
            writeln!(out, "{}\t{}\t{:.6}\t{}", rank + 1, e.id, e.score.as_f64(), text)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Vectorizes and scores every text against the query set and sorts the result.
pub fn rank<T: Real>(
    tweets: &[CleanSentence],
    query: &QuerySet,
    model: &EmbeddingModel<T>,
    policy: OovPolicy,
    aggregation: Aggregation,
) -> Result<RankedList<T>> {
    let vectorizer = Vectorizer::new(model, policy);
    let queries = query.vectors(&vectorizer);
    rank_against(tweets, &queries, &vectorizer, aggregation)
}

/// As [`rank`], with precomputed query vectors.
pub fn rank_against<T: Real>(
    tweets: &[CleanSentence],
    queries: &[SentenceVector<T>],
    vectorizer: &Vectorizer<'_, T>,
    aggregation: Aggregation,
) -> Result<RankedList<T>> {
    let scored = tweets
        .iter()
        .map(|t| {
            let v = vectorizer.vectorize(&t.tokens);
            let s = score(&v, queries, aggregation)?;
            Ok((t.origin_id.clone(), (!v.degenerate).then_some(s)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankedList::from_scores(scored, aggregation))
}
