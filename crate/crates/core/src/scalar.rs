//! Exact rational scalars and the finite sequences built from them.
//!
//! Every exact quantity in the crate is a [`Scalar`], an arbitrary-precision
//! rational kept in canonical form (positive denominator, lowest terms) by
//! `num-rational`. The canonical text form is `p/q`, or `p` when `q = 1`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical `p/q` text.
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

/// Parses `p/q` or an integer, with optional surrounding whitespace and sign.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::ParseRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Nearest double. Huge numerators and denominators are scaled first so the
/// result stays finite whenever the value itself is representable.
pub fn to_f64(x: &Scalar) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `x^k` for a nonnegative exponent.
pub fn pow(x: &Scalar, k: u32) -> Scalar {
    num_traits::pow(x.clone(), k as usize)
}

/// A finite sequence `f(1), ..., f(N)`, eagerly materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    values: Vec<Scalar>,
    label: Option<String>,
}

impl Sequence {
    pub fn new(values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyLength);
        }
        Ok(Self { values, label: None })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn constant(value: Scalar, len: usize) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::constant(Scalar::one(), len)
    }

    /// The harmonic-sum factor `n -> sgn(i)^n / n^|i|` on `1..=len`.
    pub fn harmonic(index: i64, len: usize) -> Result<Self> {
        if index == 0 {
            return Err(Error::ZeroIndex);
        }
        let power = index.unsigned_abs() as u32;
        let values = (1..=len)
            .map(|n| {
                let denom = num_traits::pow(BigInt::from(n), power as usize);
                let sign = if index < 0 && n % 2 == 1 { -1 } else { 1 };
                Scalar::new(BigInt::from(sign), denom)
            })
            .collect();
        Ok(Self::new(values)?.with_label(format!("H{index}")))
    }

    /// `n -> 1 / n^a`, the positive-exponent harmonic factor.
    pub fn inverse_power(a: u32, len: usize) -> Result<Self> {
        Self::harmonic(a as i64, len)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// One-based access: `get(1)` is `f(1)`.
    pub fn get(&self, n: usize) -> &Scalar {
        &self.values[n - 1]
    }

    /// The first `len` entries.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::LengthMismatch { expected: len, found: self.len() });
        }
        Ok(Self { values: self.values[..len].to_vec(), label: self.label.clone() })
    }

    pub fn pointwise_product(&self, other: &Sequence) -> Result<Sequence> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * y).collect();
        Ok(Self { values, label: None })
    }

    pub fn all_distinct(&self) -> bool {
        self.first_duplicate().is_none()
    }

    /// One-based positions of the first repeated value, if any.
    pub fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<&Scalar, usize> = HashMap::with_capacity(self.len());
        for (idx, v) in self.values.iter().enumerate() {
            if let Some(&first) = seen.get(v) {
                return Some((first + 1, idx + 1));
            }
            seen.insert(v, idx);
        }
        None
    }

    /// One-based position of the first zero entry, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(Zero::is_zero).map(|p| p + 1)
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        match self.first_zero() {
            Some(index) => Err(Error::ZeroEntry { index }),
            None => Ok(()),
        }
    }

    pub(crate) fn require_distinct_nonzero(&self) -> Result<()> {
        self.require_nonzero()?;
        match self.first_duplicate() {
            Some((first, second)) => Err(Error::DuplicateEntries { first, second }),
            None => Ok(()),
        }
    }

    /// Parses the one-rational-per-line text format; blank lines are skipped.
    pub fn parse_lines(text: &str) -> Result<Self> {
        let values = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(parse_scalar)
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Sequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.values.iter().map(format_scalar))
    }
}

pub(crate) fn is_negative(x: &Scalar) -> bool {
    x.is_negative()
}
