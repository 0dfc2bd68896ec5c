use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

/// Unigram distribution raised to the 3/4 power, used to draw negative samples.
#[derive(Debug, Clone)]
pub struct NegativeSamplingTable {
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    dist: WeightedIndex<f64>,
}

pub const UNIGRAM_POWER: f64 = 0.75;

impl NegativeSamplingTable {
    pub fn new(counts: &[u64]) -> Result<Self> {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(UNIGRAM_POWER)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Data("negative sampling needs a positive count".into()));
        }
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let cumulative = probabilities
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::Data(e.to_string()))?;
        Ok(NegativeSamplingTable {
            probabilities,
            cumulative,
            dist,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    /// Fills `out` with up to `k` draws, redrawing any that hit `exclude` at most
    /// [`MAX_COLLISION_DRAWS`] times before giving up on that slot.
    pub fn sample_excluding<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k: usize,
        exclude: usize,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        for _ in 0..k {
            for _ in 0..MAX_COLLISION_DRAWS {
                let idx = self.sample(rng);
                if idx != exclude {
                    out.push(idx);
                    break;
                }
            }
        }
    }
}

pub const MAX_COLLISION_DRAWS: usize = 8;
