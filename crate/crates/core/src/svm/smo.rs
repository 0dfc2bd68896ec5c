//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! min_α  ½ αᵀQα − Σα   s.t.  0 ≤ α_i ≤ C_i,  Σ y_i α_i = 0,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! Each iteration picks the maximal-violating `i` and the second-order-best partner `j`, solves
//! the two-variable subproblem analytically and updates the gradient. Iteration stops once the
//! KKT gap `max_{I_up} −y G − min_{I_low} −y G` falls to `tol`, which puts every training point
//! within `tol` of its KKT condition on `y f(x)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernel::KernelSpec;
use super::model::SvmModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig<T> {
    pub c: T,
    pub kernel: KernelSpec<T>,
    /// KKT tolerance.
    pub tol: T,
    /// Iteration cap; `0` means `max(10_000_000, 100 n)`.
    pub max_iter: usize,
    /// Seeds the scan order used to break ties in working-pair selection.
    pub seed: u64,
}

impl<T: Real> Default for SvmConfig<T> {
    fn default() -> Self {
        SvmConfig {
            c: T::one(),
            kernel: KernelSpec::default(),
            tol: T::lit(1e-3),
            max_iter: 0,
            seed: 1,
        }
    }
}

impl<T: Real> SvmConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > T::zero()) {
            return Err(Error::Config("C must be positive".into()));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::Config("tol must be positive".into()));
        }
        self.kernel.validate()
    }
}

/// Converged dual solution over all training points.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution<T> {
    pub alpha: Vec<T>,
    pub labels: Vec<i8>,
    pub upper: Vec<T>,
    /// Decision offset; `f(x) = Σ α_i y_i K(x_i, x) + bias`.
    pub bias: T,
    /// Value of `Σα − ½ αᵀQα` (the maximized form).
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
}

fn check_inputs<T: Real>(features: &[Vec<T>], labels: &[i8], upper: &[T]) -> Result<()> {
    if features.len() != labels.len() || features.len() != upper.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            actual: labels.len().min(upper.len()),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::Data(format!("labels must be +1 or -1, found {bad}")));
    }
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(Error::Data("training data must contain both classes".into()));
    }
    if let Some(first) = features.first() {
        if let Some(row) = features.iter().find(|r| r.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                actual: row.len(),
            });
        }
    }
    if upper.iter().any(|&c| !(c > T::zero())) {
        return Err(Error::Config("C must be positive".into()));
    }
    Ok(())
}

/// Solves the dual with a common bound `config.c`.
pub fn solve_smo<T: Real>(features: &[Vec<T>], labels: &[i8], config: &SvmConfig<T>) -> Result<SmoSolution<T>> {
    solve_smo_weighted(features, labels, &vec![config.c; features.len()], config)
}

/// Solves the dual with a per-example bound `upper[i]` in place of `C`.
pub fn solve_smo_weighted<T: Real>(
    features: &[Vec<T>],
    labels: &[i8],
    upper: &[T],
    config: &SvmConfig<T>,
) -> Result<SmoSolution<T>> {
    config.validate()?;
    check_inputs(features, labels, upper)?;
    let n = features.len();
    let y: Vec<T> = labels.iter().map(|&l| T::lit(l as f64)).collect();

    // K is cached in full; feature sets here are a few thousand points at most
    let mut gram = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let k = config.kernel.eval_unchecked(&features[i], &features[j]);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    let k = |i: usize, j: usize| gram[i * n + j];

    let mut alpha = vec![T::zero(); n];
    // gradient of ½αᵀQα − Σα
    let mut grad = vec![-T::one(); n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));

    let is_upper = |a: &[T], t: usize| a[t] >= upper[t];
    let is_lower = |a: &[T], t: usize| a[t] <= T::zero();
    let max_iter = if config.max_iter == 0 {
        10_000_000usize.max(100 * n)
    } else {
        config.max_iter
    };
    let tau = T::lit(TAU);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // i: argmax over I_up of −y_t G_t
        let mut g_max = T::neg_infinity();
        let mut i_sel = None;
        for &t in &order {
            let in_up = if labels[t] == 1 { !is_upper(&alpha, t) } else { !is_lower(&alpha, t) };
            if in_up {
                let v = -y[t] * grad[t];
                if v >= g_max {
                    g_max = v;
                    i_sel = Some(t);
                }
            }
        }
        // j: best second-order decrease among violators in I_low; track min over I_low
        let mut g_max2 = T::neg_infinity();
        let mut j_sel = None;
        let mut best = T::infinity();
        if let Some(i) = i_sel {
            for &t in &order {
                let in_low = if labels[t] == 1 { !is_lower(&alpha, t) } else { !is_upper(&alpha, t) };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                if v >= g_max2 {
                    g_max2 = v;
                }
                let diff = g_max + v;
                if diff > T::zero() {
                    let mut quad = k(i, i) + k(t, t) - T::lit(2.0) * k(i, t);
                    if quad <= T::zero() {
                        quad = tau;
                    }
                    let obj = -(diff * diff) / quad;
                    if obj <= best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            converged = true;
            break;
        };
        if g_max + g_max2 <= config.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (ci, cj) = (upper[i], upper[j]);
        if labels[i] != labels[j] {
            let mut quad = k(i, i) + k(j, j) + T::lit(2.0) * (y[i] * y[j] * k(i, j));
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] = alpha[i] + delta;
            alpha[j] = alpha[j] + delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = k(i, i) + k(j, j) - T::lit(2.0) * (y[i] * y[j] * k(i, j));
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] = alpha[i] - delta;
            alpha[j] = alpha[j] + delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < T::zero() {
                alpha[j] = T::zero();
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..n {
            grad[t] = grad[t] + y[t] * (y[i] * k(i, t) * di + y[j] * k(j, t) * dj);
        }
    }
    if !converged {
        log::warn!("SMO stopped at the iteration cap ({max_iter}) before reaching tol");
    }

    // offset from free vectors when there are any, else the midpoint of the feasible range
    let mut free_sum = T::zero();
    let mut free_n = 0usize;
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    for t in 0..n {
        let yg = y[t] * grad[t];
        if is_upper(&alpha, t) {
            if labels[t] == -1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(&alpha, t) {
            if labels[t] == 1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum = free_sum + yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 {
        free_sum / T::lit(free_n as f64)
    } else {
        (ub + lb) / T::lit(2.0)
    };

    // with G = Qα − 1: Σα − ½αᵀQα = −½ Σ α_i (G_i − 1)
    let half = T::lit(0.5);
    let objective = alpha
        .iter()
        .zip(&grad)
        .fold(T::zero(), |acc, (&a, &g)| acc - half * a * (g - T::one()));

    Ok(SmoSolution {
        alpha,
        labels: labels.to_vec(),
        upper: upper.to_vec(),
        bias: -rho,
        objective,
        iterations,
        converged,
    })
}

impl<T: Real> SmoSolution<T> {
    /// Keeps the points with `α > 0` as support vectors.
    pub fn into_model(self, features: &[Vec<T>], config: &SvmConfig<T>) -> SvmModel<T> {
        let mut support_vectors = Vec::new();
        let mut dual_coefs = Vec::new();
        for (i, &a) in self.alpha.iter().enumerate() {
            if a > T::zero() {
                support_vectors.push(features[i].clone());
                dual_coefs.push(a * T::lit(self.labels[i] as f64));
            }
        }
        SvmModel {
            support_vectors,
            dual_coefs,
            bias: self.bias,
            kernel: config.kernel,
            c: config.c,
        }
    }
}

/// Trains a binary SVM on `labels` in `{+1, -1}`.
pub fn train_smo<T: Real>(features: &[Vec<T>], labels: &[i8], config: &SvmConfig<T>) -> Result<SvmModel<T>> {
    let solution = solve_smo(features, labels, config)?;
    Ok(solution.into_model(features, config))
}

/// `Σα − ½ αᵀQα` for an arbitrary `alpha`, computed from the kernel directly.
pub fn dual_objective<T: Real>(features: &[Vec<T>], labels: &[i8], alpha: &[T], kernel: &KernelSpec<T>) -> T {
    let n = features.len();
    let mut quad = T::zero();
    for i in 0..n {
        for j in 0..n {
            let yy = T::lit((labels[i] * labels[j]) as f64);
            quad = quad + alpha[i] * alpha[j] * yy * kernel.eval_unchecked(&features[i], &features[j]);
        }
    }
    alpha.iter().fold(T::zero(), |acc, &a| acc + a) - quad / T::lit(2.0)
}
