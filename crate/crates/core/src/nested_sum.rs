//! Multiplicative nested sums
//!
//! ```text
//! S(f_1..f_k; N, m) = sum over N >= n_1 >= ... >= n_k >= m of f_1(n_1)...f_k(n_k)   (weak)
//! A(f_1..f_k; N, m) = sum over N >  n_1 >  ... >  n_k >= m of f_1(n_1)...f_k(n_k)   (strict)
//! ```
//!
//! evaluated three ways: as entry `(N, m)` of `P · S_{f_1} ⋯ S_{f_k}` (or the
//! `A` matrices for the strict sum), by explicit enumeration of index chains,
//! and by a floating-point streaming recurrence for convergence studies.
//!
//! With no factors (`k = 0`) both sums are `1` when `N >= m`, i.e. the entry
//! `(N, m)` of `P` alone.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{chain_product, Structured, TriMatrix};
use crate::scalar::{Scalar, Sequence};

/// Default cap on the number of tuples the brute-force oracle may visit.
pub const DEFAULT_EXPLOSION_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `N >= n_1 >= ... >= n_k >= m`
    Weak,
    /// `N > n_1 > ... > n_k >= m`
    Strict,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Strict => "strict",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weak" | "s" => Ok(Mode::Weak),
            "strict" | "a" => Ok(Mode::Strict),
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// A single nested-sum request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSpec {
    factors: Vec<Sequence>,
    n: usize,
    m: usize,
    mode: Mode,
}

impl SumSpec {
    pub fn new(factors: Vec<Sequence>, n: usize, m: usize, mode: Mode) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidBounds { n, m });
        }
        check_factor_lengths(&factors, n)?;
        Ok(Self { factors, n, m, mode })
    }

    pub fn weak(factors: Vec<Sequence>, n: usize, m: usize) -> Result<Self> {
        Self::new(factors, n, m, Mode::Weak)
    }

    pub fn strict(factors: Vec<Sequence>, n: usize, m: usize) -> Result<Self> {
        Self::new(factors, n, m, Mode::Strict)
    }

    pub fn factors(&self) -> &[Sequence] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn depth(&self) -> usize {
        self.factors.len()
    }
}

fn check_factor_lengths(factors: &[Sequence], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidBounds { n, m: 1 });
    }
    for (idx, f) in factors.iter().enumerate() {
        if f.len() < n {
            return Err(Error::FactorTooShort { factor: idx + 1, len: f.len(), n });
        }
    }
    Ok(())
}

/// Entry `(N, m)` of `P · ∏ S_{f_l}` (weak) or `P · ∏ A_{f_l}` (strict).
///
/// Only row `N` of the product is needed, and row `N` of `P` is all ones, so
/// the row vector is pushed through the chain one factor at a time. Each step
/// is a suffix sum over columns `m..=N`, giving O(k (N - m)) scalar operations.
pub fn evaluate_matrix(spec: &SumSpec) -> Scalar {
    let (n, m) = (spec.n, spec.m);
    // row[c] holds column m + c of the running row vector.
    let mut row: Vec<Scalar> = vec![Scalar::one(); n - m + 1];
    for f in &spec.factors {
        let mut acc = Scalar::zero();
        match spec.mode {
            Mode::Weak => {
                // (v S_f)_j = sum_{l = j..N} v_l f(l)
                for c in (0..row.len()).rev() {
                    acc += &row[c] * f.get(m + c);
                    row[c] = acc.clone();
                }
            }
            Mode::Strict => {
                // (v A_f)_j = sum_{l = j+1..N} v_l f(l-1)
                for c in (0..row.len()).rev() {
                    let next = acc.clone();
                    acc += &row[c] * if m + c > 1 { f.get(m + c - 1).clone() } else { Scalar::zero() };
                    row[c] = next;
                }
            }
        }
    }
    row.swap_remove(0)
}

/// Every nested sum with bounds `(i, j)`, `1 <= j <= i <= N`, from a single
/// matrix chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumTable {
    matrix: TriMatrix,
    mode: Mode,
}

impl SumTable {
    pub fn matrix(&self) -> &TriMatrix {
        &self.matrix
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The nested sum with upper bound `i` and lower bound `j`.
    pub fn get(&self, i: usize, j: usize) -> Result<Scalar> {
        self.matrix.entry(i, j)
    }

    pub fn into_matrix(self) -> TriMatrix {
        self.matrix
    }
}

/// The full product `P · ∏ S_{f_l}` (or with `A_{f_l}`), via the structured
/// O(N²)-per-factor right multiplication.
pub fn evaluate_table(factors: &[Sequence], mode: Mode, n: usize) -> Result<SumTable> {
    check_factor_lengths(factors, n)?;
    let chain: Vec<Structured> = factors
        .iter()
        .map(|f| {
            let f = f.truncate(n)?;
            Ok(match mode {
                Mode::Weak => Structured::S(f),
                Mode::Strict => Structured::A(f),
            })
        })
        .collect::<Result<_>>()?;
    let matrix = chain_product(&Structured::prefix(n)?, &chain)?;
    Ok(SumTable { matrix, mode })
}

/// Brute-force enumeration with the default explosion guard.
pub fn evaluate_bruteforce(spec: &SumSpec) -> Result<Scalar> {
    evaluate_bruteforce_guarded(spec, DEFAULT_EXPLOSION_GUARD)
}

/// Direct enumeration of every index chain. Refuses when the bounding box
/// `(N - m + 1)^k` exceeds `guard`.
pub fn evaluate_bruteforce_guarded(spec: &SumSpec, guard: u128) -> Result<Scalar> {
    let width = (spec.n - spec.m + 1) as u128;
    let tuples = (0..spec.depth()).try_fold(1u128, |acc, _| acc.checked_mul(width)).unwrap_or(u128::MAX);
    if tuples > guard {
        return Err(Error::ExplosionGuard { tuples, guard });
    }
    let strict = spec.mode == Mode::Strict;
    // The outer index ranges over [m, N] (weak) or [m, N-1] (strict); each
    // further index descends from the previous one.
    let top = if strict { spec.n.checked_sub(1) } else { Some(spec.n) };
    let mut total = Scalar::zero();
    if let Some(top) = top {
        descend(&spec.factors, spec.m, top, strict, &Scalar::one(), &mut total);
    }
    Ok(total)
}

fn descend(factors: &[Sequence], m: usize, upper: usize, strict: bool, prefix: &Scalar, total: &mut Scalar) {
    let Some((f, rest)) = factors.split_first() else {
        *total += prefix;
        return;
    };
    if upper < m {
        return;
    }
    for idx in m..=upper {
        let value = f.get(idx);
        if value.is_zero() {
            continue;
        }
        let next_upper = if strict { idx - 1 } else { idx };
        descend(rest, m, next_upper, strict, &(prefix * value), total);
    }
}

fn harmonic_factors(indices: &[i64], n: usize) -> Result<Vec<Sequence>> {
    indices.iter().map(|&i| Sequence::harmonic(i, n)).collect()
}

/// `S_{i_1,...,i_k}(N)`: weak harmonic sum with lower bound 1.
pub fn harmonic_s(indices: &[i64], n: usize) -> Result<Scalar> {
    let spec = SumSpec::weak(harmonic_factors(indices, n)?, n, 1)?;
    Ok(evaluate_matrix(&spec))
}

/// `H_{i_1,...,i_k}(N)`: strict harmonic sum with lower bound 1.
pub fn harmonic_h(indices: &[i64], n: usize) -> Result<Scalar> {
    let spec = SumSpec::strict(harmonic_factors(indices, n)?, n, 1)?;
    Ok(evaluate_matrix(&spec))
}

/// `1, 2, 4, ...` below `n_max`, then `n_max` itself.
pub fn geometric_checkpoints(start: usize, n_max: usize) -> Vec<usize> {
    let mut points = Vec::new();
    let mut n = start.max(1);
    while n < n_max {
        points.push(n);
        n = n.saturating_mul(2);
    }
    points.push(n_max);
    points
}

/// Running values of `S(1/x^{e_1}, ..., 1/x^{e_k}; N, 1)` in double precision at
/// each checkpoint.
///
/// The inner partial sums `T_l(n) = S(f_l, ..., f_k; n, 1)` obey
/// `T_l(n) = T_l(n-1) + f_l(n) T_{l+1}(n)` with `T_{k+1} = 1`, so each step
/// costs O(k) and no matrix is formed.
pub fn converge_stream(exponents: &[u32], n_max: usize, checkpoints: &[usize]) -> Result<Vec<(usize, f64)>> {
    let (&lead, _) = exponents.split_first().ok_or_else(|| Error::Invalid("no exponents given".into()))?;
    if let Some(&bad) = exponents.iter().find(|&&e| e == 0) {
        return Err(Error::InvalidExponent(bad));
    }
    if lead < 2 {
        return Err(Error::Divergent(lead));
    }
    if n_max == 0 {
        return Err(Error::EmptyLength);
    }
    let mut wanted: Vec<usize> = checkpoints.iter().copied().filter(|&c| c >= 1 && c <= n_max).collect();
    wanted.sort_unstable();
    wanted.dedup();

    let k = exponents.len();
    let mut partial = vec![0.0f64; k];
    let mut out = Vec::with_capacity(wanted.len());
    let mut next = wanted.iter().peekable();
    for n in 1..=n_max {
        let x = n as f64;
        let mut inner = 1.0;
        for l in (0..k).rev() {
            partial[l] += x.powi(-(exponents[l] as i32)) * inner;
            inner = partial[l];
        }
        if next.peek() == Some(&&n) {
            out.push((n, partial[0]));
            next.next();
        }
    }
    Ok(out)
}

/// Decimal text with `digits` significant digits, never in exponent form.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// CSV with header `N,value`.
pub fn converge_csv(points: &[(usize, f64)]) -> String {
    let mut s = String::from("N,value\n");
    for (n, v) in points {
        s.push_str(&format!("{n},{}\n", format_significant(*v, 15)));
    }
    s
}
