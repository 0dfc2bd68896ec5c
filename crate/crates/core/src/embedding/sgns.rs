//! Skip-gram negative-sampling objective for a single (center, context) pair.
//!
//! `L = -log σ(u_ctx · v_c) - Σ_k log σ(-u_k · v_c)`, where `v` rows live in the input matrix
//! and `u` rows in the output (context) matrix.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// Input (word) and output (context) matrices trained jointly.
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsWeights<T> {
    pub input: Matrix<T>,
    pub output: Matrix<T>,
}

impl<T: Real> SgnsWeights<T> {
    pub fn zeros(vocab: usize, dim: usize) -> Self {
        SgnsWeights {
            input: Matrix::zeros(vocab, dim),
            output: Matrix::zeros(vocab, dim),
        }
    }

    pub fn vocab_len(&self) -> usize {
        self.input.rows()
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    fn check(&self, center: usize, context: usize, negatives: &[usize]) -> Result<()> {
        let len = self.vocab_len();
        for &index in std::iter::once(&center).chain(Some(&context)).chain(negatives) {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        Ok(())
    }
}

/// `ln σ(x)` without overflow.
#[inline]
pub fn log_sigmoid<T: Real>(x: T) -> T {
    // ln σ(x) = -softplus(-x) = min(x, 0) - ln(1 + e^{-|x|})
    x.min(T::zero()) - (-x.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn sgns_pair_loss<T: Real>(
    center: usize,
    context: usize,
    negatives: &[usize],
    weights: &SgnsWeights<T>,
) -> Result<T> {
    weights.check(center, context, negatives)?;
    let v = weights.input.row(center);
    let mut loss = -log_sigmoid(dot(weights.output.row(context), v));
    for &k in negatives {
        loss = loss - log_sigmoid(-dot(weights.output.row(k), v));
    }
    Ok(loss)
}

/// Analytic gradient of [`sgns_pair_loss`].
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient<T> {
    /// d/dv_center
    pub center: Vec<T>,
    /// (output row, d/du_row); a row drawn several times appears once with summed gradient.
    pub output_rows: Vec<(usize, Vec<T>)>,
}

pub fn sgns_gradient<T: Real>(
    center: usize,
    context: usize,
    negatives: &[usize],
    weights: &SgnsWeights<T>,
) -> Result<SgnsGradient<T>> {
    weights.check(center, context, negatives)?;
    let dim = weights.dim();
    let v = weights.input.row(center);
    let mut grad_center = vec![T::zero(); dim];
    let mut output_rows: Vec<(usize, Vec<T>)> = Vec::new();
    let targets = std::iter::once((context, true)).chain(negatives.iter().map(|&k| (k, false)));
    for (row, positive) in targets {
        let u = weights.output.row(row);
        // dL/ds = σ(s) - 1 for the true context, σ(s) for a negative
        let label = if positive { T::one() } else { T::zero() };
        let coeff = sigmoid(dot(u, v)) - label;
        for (g, &x) in grad_center.iter_mut().zip(u) {
            *g = *g + coeff * x;
        }
        let slot = match output_rows.iter().position(|(r, _)| *r == row) {
            Some(p) => &mut output_rows[p].1,
            None => {
                output_rows.push((row, vec![T::zero(); dim]));
                &mut output_rows.last_mut().expect("just pushed").1
            }
        };
        for (g, &x) in slot.iter_mut().zip(v) {
            *g = *g + coeff * x;
        }
    }
    Ok(SgnsGradient {
        center: grad_center,
        output_rows,
    })
}

/// One gradient-descent step on [`sgns_pair_loss`]: every parameter moves by `-lr` times its
/// exact gradient at the current point. Only the center input row and the context/negative
/// output rows change.
pub fn sgns_step<T: Real>(
    center: usize,
    context: usize,
    negatives: &[usize],
    weights: &mut SgnsWeights<T>,
    lr: T,
) -> Result<()> {
    weights.check(center, context, negatives)?;
    let mut scratch = StepScratch::new(weights.dim());
    scratch.targets.clear();
    scratch.targets.push((context, true));
    scratch.targets.extend(negatives.iter().map(|&k| (k, false)));
    let SgnsWeights { input, output } = weights;
    step_rows(input.row_mut(center), output, lr, &mut scratch);
    Ok(())
}

/// Row access for the output matrix, so the same update drives both the in-place trainer and
/// the gathered copies used by parallel workers.
pub(crate) trait OutputRows<T> {
    fn row(&self, index: usize) -> &[T];
    fn row_mut(&mut self, index: usize) -> &mut [T];
}

impl<T: Real> OutputRows<T> for Matrix<T> {
    #[inline]
    fn row(&self, index: usize) -> &[T] {
        Matrix::row(self, index)
    }

    #[inline]
    fn row_mut(&mut self, index: usize) -> &mut [T] {
        Matrix::row_mut(self, index)
    }
}

pub(crate) struct StepScratch<T> {
    pub(crate) targets: Vec<(usize, bool)>,
    coeffs: Vec<T>,
    grad_center: Vec<T>,
}

impl<T: Real> StepScratch<T> {
    pub(crate) fn new(dim: usize) -> Self {
        StepScratch {
            targets: Vec::new(),
            coeffs: Vec::new(),
            grad_center: vec![T::zero(); dim],
        }
    }
}

/// Applies the exact step for `scratch.targets` (context first, flagged `true`). All scores
/// and the center gradient are taken at the pre-step point.
pub(crate) fn step_rows<T: Real, O: OutputRows<T> + ?Sized>(
    center: &mut [T],
    output: &mut O,
    lr: T,
    scratch: &mut StepScratch<T>,
) {
    let StepScratch {
        targets,
        coeffs,
        grad_center,
    } = scratch;
    grad_center.iter_mut().for_each(|g| *g = T::zero());
    coeffs.clear();
    for &(row, positive) in targets.iter() {
        let u = output.row(row);
        let label = if positive { T::one() } else { T::zero() };
        let coeff = sigmoid(dot(u, center)) - label;
        for (g, &x) in grad_center.iter_mut().zip(u) {
            *g = *g + coeff * x;
        }
        coeffs.push(coeff);
    }
    for (&(row, _), &coeff) in targets.iter().zip(coeffs.iter()) {
        let step = lr * coeff;
        for (x, &c) in output.row_mut(row).iter_mut().zip(center.iter()) {
            *x = *x - step * c;
        }
    }
    for (c, &g) in center.iter_mut().zip(grad_center.iter()) {
        *c = *c - lr * g;
    }
}
