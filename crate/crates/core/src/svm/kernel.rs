use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{dot, squared_distance, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec<T> {
    Linear,
    /// `exp(-gamma * |x - y|^2)`
    Rbf { gamma: T },
    /// Pearson VII universal kernel:
    /// `1 / (1 + (2 |x - y| sqrt(2^(1/omega) - 1) / sigma)^2)^omega`
    Puk { omega: T, sigma: T },
}

impl<T: Real> Default for KernelSpec<T> {
    fn default() -> Self {
        KernelSpec::Puk {
            omega: T::one(),
            sigma: T::one(),
        }
    }
}

impl<T: Real> KernelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            KernelSpec::Linear => true,
            KernelSpec::Rbf { gamma } => gamma > T::zero(),
            KernelSpec::Puk { omega, sigma } => omega > T::zero() && sigma > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("kernel parameters must be positive: {self}")))
        }
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> Result<T> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[T], y: &[T]) -> T {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { gamma } => (-gamma * squared_distance(x, y)).exp(),
            KernelSpec::Puk { omega, sigma } => {
                let two = T::lit(2.0);
                let scale = two * (two.powf(omega.recip()) - T::one()).sqrt() / sigma;
                let d2 = squared_distance(x, y);
                (T::one() + scale * scale * d2).powf(-omega)
            }
        }
    }
}

/// `linear`, `rbf <gamma>`, `puk <omega> <sigma>`
impl<T: Real> fmt::Display for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf {gamma}"),
            KernelSpec::Puk { omega, sigma } => write!(f, "puk {omega} {sigma}"),
        }
    }
}

impl<T: Real> FromStr for KernelSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |i: usize| -> Result<T> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad kernel spec {s:?}")))
        };
        let spec = match parts.first().copied() {
            Some("linear") if parts.len() == 1 => KernelSpec::Linear,
            Some("rbf") if parts.len() == 2 => KernelSpec::Rbf { gamma: num(1)? },
            Some("puk") if parts.len() == 3 => KernelSpec::Puk {
                omega: num(1)?,
                sigma: num(2)?,
            },
            _ => return Err(Error::Config(format!("bad kernel spec {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
