//! Identity verifiers. Each one computes both sides exactly and returns an
//! [`IdentityReport`] instead of asserting, so callers decide what a mismatch
//! means.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::algebra;
use crate::error::{Error, Result};
use crate::matrix::TriMatrix;
use crate::nested_sum::{evaluate_matrix, harmonic_s, SumSpec};
use crate::scalar::{format_scalar, pow, Scalar, Sequence};

/// One side of an identity: a number or a whole matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Side {
    Scalar(Scalar),
    Matrix(TriMatrix),
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Side::Scalar(x) => s.serialize_str(&format_scalar(x)),
            Side::Matrix(m) => m.serialize(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: Side,
    pub rhs: Side,
    pub equal: bool,
}

impl IdentityReport {
    pub fn scalar(identity: &str, params: BTreeMap<String, Value>, lhs: Scalar, rhs: Scalar) -> Self {
        let equal = lhs == rhs;
        Self { identity: identity.into(), params, lhs: Side::Scalar(lhs), rhs: Side::Scalar(rhs), equal }
    }

    pub fn matrix(identity: &str, params: BTreeMap<String, Value>, lhs: TriMatrix, rhs: TriMatrix) -> Self {
        let equal = lhs == rhs;
        Self { identity: identity.into(), params, lhs: Side::Matrix(lhs), rhs: Side::Matrix(rhs), equal }
    }
}

/// Small helper for building the `params` map.
#[macro_export]
#[doc(hidden)]
macro_rules! params {
    ($($key:expr => $val:expr),* $(,)?) => {{
        let mut m = ::std::collections::BTreeMap::<String, ::serde_json::Value>::new();
        $( m.insert($key.to_string(), ::serde_json::json!($val)); )*
        m
    }};
}

fn seq_param(f: &Sequence) -> Value {
    serde_json::to_value(f).expect("serializable")
}

fn check_sa_bounds(n: usize, m: usize) -> Result<()> {
    if m == 0 || n <= m {
        return Err(Error::InvalidBounds { n, m });
    }
    Ok(())
}

/// `S(f,g; N-1, m) = A(f,g; N, m) + A(fg; N, m)` for `N > m >= 1`.
pub fn verify_sa_two(f: &Sequence, g: &Sequence, n: usize, m: usize) -> Result<IdentityReport> {
    check_sa_bounds(n, m)?;
    let fg = f.truncate(n)?.pointwise_product(&g.truncate(n)?)?;
    let lhs = evaluate_matrix(&SumSpec::weak(vec![f.clone(), g.clone()], n - 1, m)?);
    let rhs = evaluate_matrix(&SumSpec::strict(vec![f.clone(), g.clone()], n, m)?)
        + evaluate_matrix(&SumSpec::strict(vec![fg], n, m)?);
    let params = params!("f" => seq_param(f), "g" => seq_param(g), "N" => n, "m" => m);
    Ok(IdentityReport::scalar("sa-two", params, lhs, rhs))
}

/// `S(f,g,h; N-1, m) = A(f,g,h) + A(fg,h) + A(f,gh) + A(fgh)`, all at `(N, m)`.
pub fn verify_sa_three(f: &Sequence, g: &Sequence, h: &Sequence, n: usize, m: usize) -> Result<IdentityReport> {
    check_sa_bounds(n, m)?;
    let (ft, gt, ht) = (f.truncate(n)?, g.truncate(n)?, h.truncate(n)?);
    let fg = ft.pointwise_product(&gt)?;
    let gh = gt.pointwise_product(&ht)?;
    let fgh = fg.pointwise_product(&ht)?;
    let strict = |fs: Vec<Sequence>| -> Result<Scalar> { Ok(evaluate_matrix(&SumSpec::strict(fs, n, m)?)) };
    let lhs = evaluate_matrix(&SumSpec::weak(vec![ft.clone(), gt.clone(), ht.clone()], n - 1, m)?);
    let rhs = strict(vec![ft.clone(), gt, ht.clone()])?
        + strict(vec![fg, ht])?
        + strict(vec![ft, gh])?
        + strict(vec![fgh])?;
    let params = params!("f" => seq_param(f), "g" => seq_param(g), "h" => seq_param(h), "N" => n, "m" => m);
    Ok(IdentityReport::scalar("sa-three", params, lhs, rhs))
}

pub fn verify_two_factor(a: &Sequence, b: &Sequence) -> Result<IdentityReport> {
    let (lhs, rhs) = algebra::two_factor_sides(a, b)?;
    Ok(IdentityReport::matrix("two-factor", params!("a" => seq_param(a), "b" => seq_param(b)), lhs, rhs))
}

pub fn verify_three_factor(a: &Sequence, b: &Sequence, c: &Sequence) -> Result<IdentityReport> {
    let (lhs, rhs) = algebra::three_factor_sides(a, b, c)?;
    let params = params!("a" => seq_param(a), "b" => seq_param(b), "c" => seq_param(c));
    Ok(IdentityReport::matrix("three-factor", params, lhs, rhs))
}

pub fn verify_partial_fraction(a: &Sequence, i: usize, j: usize) -> Result<IdentityReport> {
    let lhs = algebra::partial_fraction_sum(a, i, j)?;
    let rhs = if i == j { Scalar::one() } else { Scalar::zero() };
    Ok(IdentityReport::scalar("partial-fraction", params!("a" => seq_param(a), "i" => i, "j" => j), lhs, rhs))
}

/// `D·E = I` and `D·diag(a)·E = S_a` as two reports.
pub fn verify_eigen(a: &Sequence) -> Result<Vec<IdentityReport>> {
    let ed = algebra::eigendecompose(a)?;
    let n = a.len();
    let product = ed.d.mul_dense(&ed.e)?;
    let sa = crate::matrix::Structured::S(a.clone()).materialize();
    Ok(vec![
        IdentityReport::matrix("eigen-inverse", params!("a" => seq_param(a)), product, TriMatrix::identity(n)?),
        IdentityReport::matrix("eigen-reconstruct", params!("a" => seq_param(a)), ed.reconstruct(), sa),
    ])
}

/// Memoized `G(n, k)`:
/// `G(n,n) = 1`, `G(n,0) = 0` for `n >= 1`, and
/// `G(n,k) = G(n-1,k-1) + a_k G(n-1,k)` for `1 <= k < n`.
///
/// Column `k` only involves `a_1..a_k`, so rows are stored up to column
/// `min(n, a.len())`.
#[derive(Debug, Clone)]
pub struct GTable {
    a: Sequence,
    rows: Vec<Vec<Scalar>>,
}

impl GTable {
    pub fn new(a: &Sequence, bound: usize) -> Self {
        let cap = a.len();
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(bound + 1);
        rows.push(vec![Scalar::one()]);
        for n in 1..=bound {
            let prev = &rows[n - 1];
            let width = n.min(cap);
            let mut row = Vec::with_capacity(width + 1);
            row.push(Scalar::zero());
            for k in 1..=width {
                row.push(if k == n { Scalar::one() } else { &prev[k - 1] + a.get(k) * &prev[k] });
            }
            rows.push(row);
        }
        Self { a: a.clone(), rows }
    }

    pub fn bound(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn sequence(&self) -> &Sequence {
        &self.a
    }

    pub fn get(&self, n: usize, k: usize) -> Result<Scalar> {
        if k > n {
            return Err(Error::KExceedsN { k, n });
        }
        if k == n {
            return Ok(Scalar::one());
        }
        let row = self.rows.get(n).ok_or(Error::IndexOutOfRange { i: n, j: k, n: self.bound() })?;
        row.get(k).cloned().ok_or(Error::LengthMismatch { expected: k, found: self.a.len() })
    }
}

pub fn butler_karasik_g(a: &Sequence, n: usize, k: usize) -> Result<Scalar> {
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    GTable::new(a, n).get(n, k)
}

/// `S(a,...,a; N, 1)` with `k` copies against `G(N + k, N)`.
pub fn verify_butler_karasik(a: &Sequence, n: usize, k: usize) -> Result<IdentityReport> {
    if n == 0 || k == 0 {
        return Err(Error::Invalid(format!("need N >= 1 and k >= 1, got N = {n}, k = {k}")));
    }
    let lhs = evaluate_matrix(&SumSpec::weak(vec![a.clone(); k], n, 1)?);
    let rhs = butler_karasik_g(a, n + k, n)?;
    Ok(IdentityReport::scalar("butler-karasik", params!("a" => seq_param(a), "N" => n, "k" => k), lhs, rhs))
}

/// `sum_{j=1..N} (∏_{m≠j} 1/(1 - a_m/a_j)) a_j^k` over the whole sequence.
pub fn symmetric_expansion(a: &Sequence, k: u32) -> Result<Scalar> {
    a.require_distinct_nonzero()?;
    let n = a.len();
    let mut total = Scalar::zero();
    for j in 1..=n {
        let aj = a.get(j);
        let mut weight = Scalar::one();
        for m in (1..=n).filter(|&m| m != j) {
            weight *= Scalar::one() - a.get(m) / aj;
        }
        total += pow(aj, k) / weight;
    }
    Ok(total)
}

pub fn verify_symmetric_expansion(a: &Sequence, k: u32) -> Result<IdentityReport> {
    let rhs = symmetric_expansion(a, k)?;
    let lhs = evaluate_matrix(&SumSpec::weak(vec![a.clone(); k as usize], a.len(), 1)?);
    Ok(IdentityReport::scalar("symmetric-expansion", params!("a" => seq_param(a), "k" => k), lhs, rhs))
}

/// `C(n, l)` for `l = 0..=n` by the multiplicative recurrence.
fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for l in 1..=n {
        c = c * BigInt::from(n - l + 1) / BigInt::from(l);
        row.push(c.clone());
    }
    row
}

/// `sum_{l=1..N} C(N,l) (-1)^{l-1} / l^k`.
pub fn dilcher_rhs(n: usize, k: u32) -> Result<Scalar> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let binom = binomial_row(n);
    let mut total = Scalar::zero();
    for (l, c) in binom.iter().enumerate().skip(1) {
        let term = Scalar::new(c.clone(), num_traits::pow(BigInt::from(l), k as usize));
        if l % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

pub fn verify_dilcher(n: usize, k: u32) -> Result<IdentityReport> {
    let rhs = dilcher_rhs(n, k)?;
    let lhs = harmonic_s(&vec![1; k as usize], n)?;
    Ok(IdentityReport::scalar("dilcher", params!("N" => n, "k" => k), lhs, rhs))
}

/// `sum_{l=1..N} (∏_{n≠l} n^a / (n^a - l^a)) / l^{ak}`.
pub fn general_dilcher_rhs(a: u32, n: usize, k: u32) -> Result<Scalar> {
    if a == 0 {
        return Err(Error::InvalidExponent(a));
    }
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    let powers: Vec<BigInt> = (1..=n).map(|x| num_traits::pow(BigInt::from(x), a as usize)).collect();
    let mut total = Scalar::zero();
    for l in 1..=n {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for m in (1..=n).filter(|&m| m != l) {
            num *= &powers[m - 1];
            den *= &powers[m - 1] - &powers[l - 1];
        }
        den *= num_traits::pow(powers[l - 1].clone(), k as usize);
        total += Scalar::new(num, den);
    }
    Ok(total)
}

pub fn verify_general_dilcher(a: u32, n: usize, k: u32) -> Result<IdentityReport> {
    let rhs = general_dilcher_rhs(a, n, k)?;
    let lhs = harmonic_s(&vec![a as i64; k as usize], n)?;
    Ok(IdentityReport::scalar("general-dilcher", params!("a" => a, "N" => n, "k" => k), lhs, rhs))
}
