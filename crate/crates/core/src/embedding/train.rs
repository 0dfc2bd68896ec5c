//! Skip-gram training loop.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::model::EmbeddingModel;
use super::sampling::NegativeSamplingTable;
use super::sgns::{step_rows, OutputRows, SgnsWeights, StepScratch};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::ingest::CleanSentence;
use crate::scalar::Real;

/// Learning rate never decays below this fraction of the initial rate.
pub const MIN_LR_FRACTION: f64 = 1e-4;

/// Frequent-word subsampling threshold used when subsampling is switched on.
pub const DEFAULT_SUBSAMPLE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub window: usize,
    pub dim: usize,
    pub negatives: usize,
    pub min_count: usize,
    pub epochs: usize,
    /// Sentences handed to a worker at a time.
    pub chunk_size: usize,
    pub initial_lr: f64,
    pub seed: u64,
    /// `1` trains deterministically; more workers share the matrices without locking.
    pub workers: usize,
    /// Frequent-word subsampling threshold; `None` disables subsampling.
    pub subsample: Option<f64>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            window: 5,
            dim: 300,
            negatives: 10,
            min_count: 5,
            epochs: 5,
            chunk_size: 50,
            initial_lr: 0.025,
            seed: 1,
            workers: 1,
            subsample: None,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("window", self.window),
            ("dim", self.dim),
            ("negatives", self.negatives),
            ("min_count", self.min_count),
            ("epochs", self.epochs),
            ("chunk_size", self.chunk_size),
            ("workers", self.workers),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::Config("initial_lr must be positive".into()));
        }
        if let Some(t) = self.subsample {
            if !(t > 0.0) {
                return Err(Error::Config("subsample threshold must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Holds the encoded corpus and both weight matrices while training runs.
pub struct Trainer<T> {
    config: TrainingConfig,
    vocab: Vocabulary,
    corpus: Vec<Vec<u32>>,
    table: NegativeSamplingTable,
    weights: SgnsWeights<T>,
    keep_prob: Option<Vec<f64>>,
    epochs_done: usize,
}

impl<T: Real> Trainer<T> {
    /// Builds the vocabulary, encodes the corpus and initializes the weights: input rows
    /// uniform in `[-0.5/dim, 0.5/dim]`, output rows zero.
    pub fn new(sentences: &[CleanSentence], config: TrainingConfig) -> Result<Self> {
        config.validate()?;
        let vocab = Vocabulary::build(sentences, config.min_count)?;
        let corpus: Vec<Vec<u32>> = sentences
            .iter()
            .map(|s| {
                s.tokens
                    .iter()
                    .filter_map(|t| vocab.get(t).map(|i| i as u32))
                    .collect::<Vec<_>>()
            })
            .filter(|s| s.len() >= 2)
            .collect();
        let counts = vocab.counts().expect("built vocabulary has counts");
        let table = NegativeSamplingTable::new(counts)?;

        let keep_prob = config.subsample.map(|t| {
            let total: u64 = counts.iter().sum();
            counts
                .iter()
                .map(|&c| {
                    let f = c as f64 / total as f64;
                    (((f / t).sqrt() + 1.0) * t / f).min(1.0)
                })
                .collect()
        });

        let dim = config.dim;
        let mut weights = SgnsWeights::zeros(vocab.len(), dim);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let half = 0.5 / dim as f64;
        for x in weights.input.as_mut_slice() {
            *x = T::lit(rng.random_range(-half..=half));
        }
        Ok(Trainer {
            config,
            vocab,
            corpus,
            table,
            weights,
            keep_prob,
            epochs_done: 0,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn weights(&self) -> &SgnsWeights<T> {
        &self.weights
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    /// Sentences that yield at least one training pair.
    pub fn trainable_sentences(&self) -> usize {
        self.corpus.len()
    }

    fn tokens_per_epoch(&self) -> u64 {
        self.corpus.iter().map(|s| s.len() as u64).sum()
    }

    /// Runs all remaining epochs.
    pub fn run(&mut self) -> Result<()> {
        while self.epochs_done < self.config.epochs {
            self.run_epoch()?;
        }
        Ok(())
    }

    /// Runs one epoch. Learning rate decays linearly in processed center tokens over the whole
    /// schedule (`epochs` passes over the corpus).
    pub fn run_epoch(&mut self) -> Result<()> {
        if self.epochs_done >= self.config.epochs {
            return Err(Error::Config("all scheduled epochs already ran".into()));
        }
        if self.config.workers == 1 {
            self.epoch_sequential();
        } else {
            self.epoch_parallel();
        }
        self.epochs_done += 1;
        Ok(())
    }

    fn lr_at(&self, processed: u64, total: u64) -> T {
        let progress = processed as f64 / total.max(1) as f64;
        T::lit(self.config.initial_lr * (1.0 - progress).max(MIN_LR_FRACTION))
    }

    fn epoch_sequential(&mut self) {
        let per_epoch = self.tokens_per_epoch();
        let total = per_epoch * self.config.epochs as u64;
        let mut processed = per_epoch * self.epochs_done as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(self.config.seed, self.epochs_done, 0));
        let mut scratch = StepScratch::new(self.config.dim);
        let mut negs = Vec::with_capacity(self.config.negatives);
        let mut kept = Vec::new();
        let corpus = std::mem::take(&mut self.corpus);
        for sentence in &corpus {
            subsample_into(sentence, self.keep_prob.as_deref(), &mut rng, &mut kept);
            for pos in 0..kept.len() {
                let lr = self.lr_at(processed, total);
                processed += 1;
                let center = kept[pos] as usize;
                for ctx_pos in window(pos, kept.len(), self.config.window) {
                    let context = kept[ctx_pos] as usize;
                    self.table
                        .sample_excluding(&mut rng, self.config.negatives, context, &mut negs);
                    fill_targets(&mut scratch, context, &negs);
                    let SgnsWeights { input, output } = &mut self.weights;
                    step_rows(input.row_mut(center), output, lr, &mut scratch);
                }
            }
            // subsampled-out tokens still advance the schedule
            processed += (sentence.len() - kept.len()) as u64;
        }
        self.corpus = corpus;
    }

    /// Lock-free shared-weight epoch: workers claim sentence chunks and update the matrices
    /// without synchronization. Concurrent writes to one row may be lost; the result depends on
    /// thread timing.
    fn epoch_parallel(&mut self) {
        let dim = self.config.dim;
        let per_epoch = self.tokens_per_epoch();
        let total = per_epoch * self.config.epochs as u64;
        let base = per_epoch * self.epochs_done as u64;
        let input = SharedMatrix::from_matrix(&self.weights.input);
        let output = SharedMatrix::from_matrix(&self.weights.output);
        let next_chunk = AtomicUsize::new(0);
        let processed = AtomicU64::new(base);
        let chunk = self.config.chunk_size;
        let this = &*self;

        std::thread::scope(|scope| {
            for worker in 0..this.config.workers {
                let (input, output, next_chunk, processed) = (&input, &output, &next_chunk, &processed);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
                        this.config.seed,
                        this.epochs_done,
                        worker + 1,
                    ));
                    let mut scratch = StepScratch::new(dim);
                    let mut negs = Vec::new();
                    let mut kept = Vec::new();
                    let mut center_buf = vec![T::zero(); dim];
                    let mut gathered = GatheredRows::new(dim);
                    loop {
                        let c = next_chunk.fetch_add(1, Ordering::Relaxed);
                        let start = c * chunk;
                        if start >= this.corpus.len() {
                            break;
                        }
                        let sentences = &this.corpus[start..(start + chunk).min(this.corpus.len())];
                        for sentence in sentences {
                            subsample_into(sentence, this.keep_prob.as_deref(), &mut rng, &mut kept);
                            for pos in 0..kept.len() {
                                let done = processed.fetch_add(1, Ordering::Relaxed);
                                let lr = this.lr_at(done, total);
                                let center = kept[pos] as usize;
                                for ctx_pos in window(pos, kept.len(), this.config.window) {
                                    let context = kept[ctx_pos] as usize;
                                    this.table.sample_excluding(
                                        &mut rng,
                                        this.config.negatives,
                                        context,
                                        &mut negs,
                                    );
                                    fill_targets(&mut scratch, context, &negs);
                                    input.load_row(center, &mut center_buf);
                                    gathered.gather(output, &scratch.targets);
                                    step_rows(&mut center_buf, &mut gathered, lr, &mut scratch);
                                    input.store_row(center, &center_buf);
                                    gathered.scatter(output);
                                }
                            }
                            processed.fetch_add((sentence.len() - kept.len()) as u64, Ordering::Relaxed);
                        }
                    }
                });
            }
        });
        self.weights.input = input.into_matrix();
        self.weights.output = output.into_matrix();
    }

    /// Discards the output matrix and returns the published embeddings.
    pub fn into_model(self) -> Result<EmbeddingModel<T>> {
        EmbeddingModel::new(self.vocab, self.weights.input)
    }
}

/// Trains skip-gram embeddings. See [`Trainer`].
pub fn train<T: Real>(sentences: &[CleanSentence], config: &TrainingConfig) -> Result<EmbeddingModel<T>> {
    let mut trainer = Trainer::new(sentences, config.clone())?;
    log::info!(
        "training on {} sentences, vocabulary {}",
        trainer.trainable_sentences(),
        trainer.vocab().len()
    );
    trainer.run()?;
    trainer.into_model()
}

fn stream_seed(seed: u64, epoch: usize, worker: usize) -> u64 {
    seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(1 + epoch as u64 * 1024 + worker as u64))
}

fn window(pos: usize, len: usize, radius: usize) -> impl Iterator<Item = usize> {
    let lo = pos.saturating_sub(radius);
    let hi = (pos + radius).min(len - 1);
    (lo..=hi).filter(move |&p| p != pos)
}

fn fill_targets<T: Real>(scratch: &mut StepScratch<T>, context: usize, negs: &[usize]) {
    scratch.targets.clear();
    scratch.targets.push((context, true));
    scratch.targets.extend(negs.iter().map(|&k| (k, false)));
}

fn subsample_into<R: Rng>(sentence: &[u32], keep_prob: Option<&[f64]>, rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    match keep_prob {
        None => out.extend_from_slice(sentence),
        Some(p) => out.extend(
            sentence
                .iter()
                .copied()
                .filter(|&w| rng.random::<f64>() < p[w as usize]),
        ),
    }
}

/// Matrix of `f64` bit patterns readable and writable from many threads at once.
struct SharedMatrix {
    cols: usize,
    cells: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_matrix<T: Real>(m: &Matrix<T>) -> Self {
        SharedMatrix {
            cols: m.cols(),
            cells: m
                .as_slice()
                .iter()
                .map(|x| AtomicU64::new(x.as_f64().to_bits()))
                .collect(),
        }
    }

    fn load_row<T: Real>(&self, row: usize, out: &mut [T]) {
        let cells = &self.cells[row * self.cols..(row + 1) * self.cols];
        for (o, c) in out.iter_mut().zip(cells) {
            *o = T::lit(f64::from_bits(c.load(Ordering::Relaxed)));
        }
    }

    fn store_row<T: Real>(&self, row: usize, values: &[T]) {
        let cells = &self.cells[row * self.cols..(row + 1) * self.cols];
        for (v, c) in values.iter().zip(cells) {
            c.store(v.as_f64().to_bits(), Ordering::Relaxed);
        }
    }

    fn into_matrix<T: Real>(self) -> Matrix<T> {
        let rows = self.cells.len() / self.cols;
        Matrix::from_vec(
            rows,
            self.cols,
            self.cells
                .into_iter()
                .map(|c| T::lit(f64::from_bits(c.into_inner())))
                .collect(),
        )
    }
}

/// Local copies of the output rows touched by one step; repeated indices share a slot.
struct GatheredRows<T> {
    dim: usize,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> GatheredRows<T> {
    fn new(dim: usize) -> Self {
        GatheredRows {
            dim,
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    fn slot(&self, index: usize) -> usize {
        self.indices
            .iter()
            .position(|&i| i == index)
            .expect("row gathered before use")
    }

    fn gather(&mut self, shared: &SharedMatrix, targets: &[(usize, bool)]) {
        self.indices.clear();
        for &(row, _) in targets {
            if !self.indices.contains(&row) {
                self.indices.push(row);
            }
        }
        self.data.resize(self.indices.len() * self.dim, T::zero());
        for (slot, &row) in self.indices.iter().enumerate() {
            shared.load_row(row, &mut self.data[slot * self.dim..(slot + 1) * self.dim]);
        }
    }

    fn scatter(&self, shared: &SharedMatrix) {
        for (slot, &row) in self.indices.iter().enumerate() {
            shared.store_row(row, &self.data[slot * self.dim..(slot + 1) * self.dim]);
        }
    }
}

impl<T: Real> OutputRows<T> for GatheredRows<T> {
    fn row(&self, index: usize) -> &[T] {
        let s = self.slot(index);
        &self.data[s * self.dim..(s + 1) * self.dim]
    }

    fn row_mut(&mut self, index: usize) -> &mut [T] {
        let s = self.slot(index);
        &mut self.data[s * self.dim..(s + 1) * self.dim]
    }
}
