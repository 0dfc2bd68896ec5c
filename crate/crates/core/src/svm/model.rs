use std::io::{BufRead, Write};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::ingest::CommentLabel;
use crate::scalar::Real;

/// Trained SVM: `f(x) = Σ dual_coefs_i K(sv_i, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<T> {
    pub support_vectors: Vec<Vec<T>>,
    /// `α_i y_i` per support vector.
    pub dual_coefs: Vec<T>,
    pub bias: T,
    pub kernel: KernelSpec<T>,
    pub c: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub label: CommentLabel,
    pub decision: T,
}

impl<T: Real> SvmModel<T> {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    pub fn decision_value(&self, x: &[T]) -> Result<T> {
        if let Some(dim) = self.dim() {
            if dim != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: x.len(),
                });
            }
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .fold(self.bias, |acc, (sv, &coef)| acc + coef * self.kernel.eval_unchecked(sv, x)))
    }

    /// Positive decision values are informative; zero falls to the negative class.
    pub fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        let decision = self.decision_value(x)?;
        let label = if decision > T::zero() {
            CommentLabel::Informative
        } else {
            CommentLabel::NonInformative
        };
        Ok(Prediction { label, decision })
    }

    /// Text format:
    ///
    /// ```text
    /// svm-model 1
    /// scalar f64
    /// kernel puk 1 1
    /// c 1
    /// bias -0.25
    /// dim 2
    /// n_sv 3
    /// <dual coef> <x1> <x2>
    /// ...
    /// ```
    ///
    /// Numbers are written in shortest round-trip form, so load(save(m)) == m exactly.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.dim().unwrap_or(0);
        writeln!(out, "svm-model 1")?;
        writeln!(out, "scalar {}", T::type_name())?;
        writeln!(out, "kernel {}", self.kernel)?;
        writeln!(out, "c {}", self.c)?;
        writeln!(out, "bias {}", self.bias)?;
        writeln!(out, "dim {dim}")?;
        writeln!(out, "n_sv {}", self.support_vectors.len())?;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefs) {
            write!(out, "{coef}")?;
            for x in sv {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let mut header = |key: &str| -> Result<String> {
            let (i, line) = lines.next().ok_or_else(|| Error::Format {
                line: 0,
                message: format!("missing {key} line"),
            })?;
            let line = line?;
            let (k, v) = line.split_once(' ').unwrap_or((line.as_str(), ""));
            if k != key {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected {key:?}, found {k:?}"),
                });
            }
            Ok(v.to_string())
        };
        let bad = |line: usize, what: &str| Error::Format {
            line,
            message: format!("bad {what}"),
        };
        if header("svm-model")? != "1" {
            return Err(bad(1, "format version"));
        }
        let scalar = header("scalar")?;
        if scalar != T::type_name() {
            log::info!("reading {scalar} SVM model as {}", T::type_name());
        }
        let kernel: KernelSpec<T> = header("kernel")?.parse().map_err(|_| bad(3, "kernel"))?;
        let c: T = header("c")?.parse().map_err(|_| bad(4, "C"))?;
        let bias: T = header("bias")?.parse().map_err(|_| bad(5, "bias"))?;
        let dim: usize = header("dim")?.parse().map_err(|_| bad(6, "dim"))?;
        let n_sv: usize = header("n_sv")?.parse().map_err(|_| bad(7, "n_sv"))?;

        let mut support_vectors = Vec::with_capacity(n_sv);
        let mut dual_coefs = Vec::with_capacity(n_sv);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let values = line
                .split_whitespace()
                .map(|v| v.parse::<T>())
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|_| bad(i + 1, "number"))?;
            if values.len() != dim + 1 {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected {} values, found {}", dim + 1, values.len()),
                });
            }
            dual_coefs.push(values[0]);
            support_vectors.push(values[1..].to_vec());
        }
        if support_vectors.len() != n_sv {
            return Err(Error::Format {
                line: 8 + support_vectors.len(),
                message: format!("header declares {n_sv} support vectors, found {}", support_vectors.len()),
            });
        }
        Ok(SvmModel {
            support_vectors,
            dual_coefs,
            bias,
            kernel,
            c,
        })
    }
}
