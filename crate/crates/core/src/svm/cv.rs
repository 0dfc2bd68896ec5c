use std::thread;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::features::{normalized_tf_features, NtfVocabulary};
use super::smo::{solve_smo, SvmConfig};
use crate::error::{Error, Result};
use crate::evaluation::{prf, ConfusionCounts, MetricReport};
use crate::ingest::CommentLabel;
use crate::scalar::Real;

/// Partitions tried before giving up on a split with a single-class training set.
pub const MAX_PARTITION_ATTEMPTS: u64 = 10;

/// Fold index per example: a seeded shuffle dealt round-robin, so sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldAssignment {
    folds: Vec<usize>,
    k: usize,
    seed: u64,
}

impl FoldAssignment {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {k}")));
        }
        if n < k {
            return Err(Error::Data(format!("{n} examples cannot fill {k} folds")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut folds = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            folds[i] = pos % k;
        }
        Ok(FoldAssignment { folds, k, seed })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn fold_of(&self, i: usize) -> usize {
        self.folds[i]
    }

    pub fn folds(&self) -> &[usize] {
        &self.folds
    }

    pub fn validation_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn training_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }

    fn training_splits_have_both_classes(&self, labels: &[CommentLabel]) -> bool {
        (0..self.k).all(|f| {
            let mut seen = [false; 2];
            for (i, l) in labels.iter().enumerate() {
                if self.folds[i] != f {
                    seen[l.is_positive() as usize] = true;
                }
            }
            seen[0] && seen[1]
        })
    }
}

/// Classifier inputs. Normalized-tf vocabularies are rebuilt from each training split so the
/// validation fold never leaks into the feature space.
#[derive(Debug, Clone, Copy)]
pub enum Features<'a, T> {
    Dense(&'a [Vec<T>]),
    NormalizedTf(&'a [Vec<String>]),
}

impl<T: Real> Features<'_, T> {
    pub fn len(&self) -> usize {
        match self {
            Features::Dense(x) => x.len(),
            Features::NormalizedTf(x) => x.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn materialize(&self, train: &[usize], rows: &[usize]) -> Vec<Vec<T>> {
        match self {
            Features::Dense(x) => rows.iter().map(|&i| x[i].clone()).collect(),
            Features::NormalizedTf(docs) => {
                let training: Vec<&[String]> = train.iter().map(|&i| docs[i].as_slice()).collect();
                let vocab = NtfVocabulary::build(&training);
                rows.iter().map(|&i| normalized_tf_features(&docs[i], &vocab)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig<T> {
    pub k: usize,
    /// Partition seed; the SMO seed lives in `svm`.
    pub seed: u64,
    pub svm: SvmConfig<T>,
    /// Folds trained concurrently; results do not depend on this.
    pub workers: usize,
}

impl<T: Real> Default for CvConfig<T> {
    fn default() -> Self {
        CvConfig {
            k: 10,
            seed: 1,
            svm: SvmConfig::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub validation_size: usize,
    pub n_support_vectors: usize,
    pub converged: bool,
    pub confusion: ConfusionCounts,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub assignment: FoldAssignment,
    /// Partitions discarded because a training split lacked a class.
    pub reseeds: u64,
    pub folds: Vec<FoldResult>,
    /// Out-of-fold prediction per example.
    pub predictions: Vec<CommentLabel>,
    /// Metrics over the pooled confusion matrix.
    pub report: MetricReport,
}

struct FoldOutput {
    result: FoldResult,
    predictions: Vec<(usize, CommentLabel)>,
}

fn run_fold<T: Real>(
    features: &Features<'_, T>,
    labels: &[CommentLabel],
    assignment: &FoldAssignment,
    fold: usize,
    svm: &SvmConfig<T>,
) -> Result<FoldOutput> {
    let train = assignment.training_indices(fold);
    let validation = assignment.validation_indices(fold);
    let x_train = features.materialize(&train, &train);
    let y_train: Vec<i8> = train.iter().map(|&i| labels[i].sign()).collect();
    let x_val = features.materialize(&train, &validation);

    let solution = solve_smo(&x_train, &y_train, svm)?;
    let converged = solution.converged;
    let model = solution.into_model(&x_train, svm);
    let mut confusion = ConfusionCounts::default();
    let mut predictions = Vec::with_capacity(validation.len());
    for (&i, x) in validation.iter().zip(&x_val) {
        let p = model.predict(x)?;
        confusion.record(labels[i].is_positive(), p.label.is_positive());
        predictions.push((i, p.label));
    }
    let mut report = prf(&confusion);
    report.confusion = Some(confusion);
    Ok(FoldOutput {
        result: FoldResult {
            fold,
            train_size: train.len(),
            validation_size: validation.len(),
            n_support_vectors: model.support_vectors.len(),
            converged,
            confusion,
            report,
        },
        predictions,
    })
}

/// k-fold cross-validation with pooled precision, recall and F-measure.
pub fn cross_validate<T: Real>(features: Features<'_, T>, labels: &[CommentLabel], config: &CvConfig<T>) -> Result<CvReport> {
    config.svm.validate()?;
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            actual: features.len(),
        });
    }
    let mut found = None;
    for attempt in 0..MAX_PARTITION_ATTEMPTS {
        let assignment = FoldAssignment::new(labels.len(), config.k, config.seed.wrapping_add(attempt))?;
        if assignment.training_splits_have_both_classes(labels) {
            found = Some((assignment, attempt));
            break;
        }
    }
    let (assignment, reseeds) = found.ok_or_else(|| {
        Error::Data(format!(
            "every one of {MAX_PARTITION_ATTEMPTS} partitions left a training split with a single class"
        ))
    })?;

    let workers = config.workers.clamp(1, config.k);
    let outputs: Vec<Result<FoldOutput>> = if workers == 1 {
        (0..config.k)
            .map(|f| run_fold(&features, labels, &assignment, f, &config.svm))
            .collect()
    } else {
        let mut slots: Vec<Option<Result<FoldOutput>>> = (0..config.k).map(|_| None).collect();
        thread::scope(|scope| {
            for (w, chunk) in slots.chunks_mut(config.k.div_ceil(workers)).enumerate() {
                let (features, assignment, svm) = (&features, &assignment, &config.svm);
                let base = w * config.k.div_ceil(workers);
                scope.spawn(move || {
                    for (j, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(run_fold(features, labels, assignment, base + j, svm));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("every fold ran")).collect()
    };

    let mut folds = Vec::with_capacity(config.k);
    let mut predictions = vec![CommentLabel::NonInformative; labels.len()];
    let mut pooled = ConfusionCounts::default();
    for out in outputs {
        let out = out?;
        pooled = pooled.merge(&out.result.confusion);
        for (i, p) in out.predictions {
            predictions[i] = p;
        }
        folds.push(out.result);
    }
    let mut report = prf(&pooled);
    report.confusion = Some(pooled);
    Ok(CvReport {
        assignment,
        reseeds,
        folds,
        predictions,
        report,
    })
}
