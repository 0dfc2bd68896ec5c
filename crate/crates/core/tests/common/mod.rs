//! Shared generators and brute-force oracles for the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use crossplat::ingest::{normalize_with_origin, CleanSentence};
use crossplat::svm::KernelSpec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------------------------
// planted-topic corpora

pub const FILLER: &[&str] = &[
    "the", "a", "is", "to", "and", "of", "in", "it", "this", "for", "with", "on", "my", "you",
    "that", "be", "so", "just", "when", "what",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topic {
    /// Stand-in for software discussion.
    Software,
    /// Unrelated chatter.
    OffTopic,
}

impl Topic {
    pub fn word(self, i: usize) -> String {
        match self {
            Topic::Software => format!("sw{i}x"),
            Topic::OffTopic => format!("ot{i}y"),
        }
    }
}

pub const TOPIC_WORDS: usize = 40;

/// Topic words are drawn with a Zipf-like skew; `topic_share` of the tokens are topical, the
/// rest filler shared by both topics.
pub fn planted_text<R: Rng>(rng: &mut R, topic: Topic, topic_share: f64) -> String {
    let len = rng.random_range(8..=14);
    let words: Vec<String> = (0..len)
        .map(|_| {
            if rng.random_bool(topic_share) {
                let u: f64 = rng.random();
                let i = ((TOPIC_WORDS as f64).powf(u) - 1.0) as usize;
                topic.word(i.min(TOPIC_WORDS - 1))
            } else {
                FILLER[rng.random_range(0..FILLER.len())].to_string()
            }
        })
        .collect();
    words.join(" ")
}

pub fn planted_sentences<R: Rng>(rng: &mut R, topic: Topic, n: usize, prefix: &str) -> Vec<CleanSentence> {
    (0..n)
        .map(|i| normalize_with_origin(&planted_text(rng, topic, 0.6), format!("{prefix}{i}")))
        .collect()
}

/// Two topic corpora interleaved, topic A first within each pair.
pub fn planted_corpus(seed: u64, per_topic: usize) -> Vec<CleanSentence> {
    let mut r = rng(seed);
    let a = planted_sentences(&mut r, Topic::Software, per_topic, "a");
    let b = planted_sentences(&mut r, Topic::OffTopic, per_topic, "b");
    a.into_iter().zip(b).flat_map(|(x, y)| [x, y]).collect()
}

// ---------------------------------------------------------------------------------------------
// tf-idf oracle

/// Dense smooth-idf tf-idf with L2 normalization, computed directly from the definitions.
pub struct DenseTfidf {
    pub terms: Vec<String>,
    pub idf: Vec<f64>,
}

impl DenseTfidf {
    pub fn fit(docs: &[Vec<String>]) -> Self {
        let terms: Vec<String> = docs.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let n = docs.len() as f64;
        let idf = terms
            .iter()
            .map(|t| {
                let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                ((1.0 + n) / (1.0 + df)).ln() + 1.0
            })
            .collect();
        DenseTfidf { terms, idf }
    }

    pub fn transform(&self, doc: &[String]) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .terms
            .iter()
            .zip(&self.idf)
            .map(|(t, idf)| doc.iter().filter(|w| *w == t).count() as f64 * idf)
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na < 1e-12 || nb < 1e-12 {
        0.0
    } else {
        dot / (na * nb)
    }
}

// ---------------------------------------------------------------------------------------------
// SVM dual oracle

pub fn gram(points: &[Vec<f64>], kernel: &KernelSpec<f64>) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(&points[i], &points[j]).unwrap())
}

pub fn objective(q: &DMatrix<f64>, alpha: &DVector<f64>) -> f64 {
    alpha.sum() - 0.5 * alpha.dot(&(q * alpha))
}

/// Exact maximizer of `Σα − ½αᵀQα` over `0 ≤ α ≤ c`, `yᵀα = 0`, found by visiting every
/// assignment of points to {at 0, at c, free}: on each face the optimum solves the stationarity
/// equations with one multiplier for the equality constraint. Q must be positive definite.
pub fn exhaustive_dual(points: &[Vec<f64>], labels: &[i8], c: f64, kernel: &KernelSpec<f64>) -> (f64, DVector<f64>) {
    let n = points.len();
    let k = gram(points, kernel);
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
    let mut best = (f64::NEG_INFINITY, DVector::zeros(n));
    let faces = 3usize.pow(n as u32);
    for code in 0..faces {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha = DVector::from_fn(n, |i, _| if state[i] == 1 { c } else { 0.0 });
        if !free.is_empty() {
            let m = free.len();
            let mut a = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q[(i, j)];
                }
                a[(r, m)] = y[i];
                a[(m, r)] = y[i];
                let fixed: f64 = (0..n).filter(|&j| state[j] == 1).map(|j| q[(i, j)] * c).sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[m] = -(0..n).filter(|&j| state[j] == 1).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = a.lu().solve(&rhs) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible = alpha.iter().all(|&a| a >= -1e-12 && a <= c + 1e-12)
            && y.iter().zip(alpha.iter()).map(|(y, a)| y * a).sum::<f64>().abs() < 1e-9;
        if feasible {
            let value = objective(&q, &alpha);
            if value > best.0 {
                best = (value, alpha);
            }
        }
    }
    best
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect()
}

/// Labels with both classes present.
pub fn random_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<i8> {
    loop {
        let y: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        if y.contains(&1) && y.contains(&-1) {
            return y;
        }
    }
}

// ---------------------------------------------------------------------------------------------
// counting

pub fn df_filter(comments: &[Vec<String>], min_df: usize) -> Vec<String> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for c in comments {
        for w in c.iter().map(String::as_str).collect::<BTreeSet<_>>() {
            *df.entry(w).or_default() += 1;
        }
    }
    df.into_iter().filter(|&(_, d)| d >= min_df).map(|(w, _)| w.to_string()).collect()
}
