//! Lower-triangular index matrices and their products.
//!
//! [`TriMatrix`] stores only the `N(N+1)/2` entries on or below the diagonal,
//! so the zero upper triangle is structural. [`Structured`] describes the
//! index matrices `S_f`, `A_f`, the shift `Δ` and the prefix matrix `P` in
//! O(N) space; multiplying by one of them on the right costs O(N²) instead of
//! the O(N³) dense triangular product.
//!
//! All public indices are one-based.

use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, Scalar, Sequence};

/// Row count above which products are computed row-parallel.
const PARALLEL_ROWS: usize = 48;

#[derive(Clone, PartialEq, Eq)]
pub struct TriMatrix {
    n: usize,
    data: Vec<Scalar>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl TriMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        Ok(Self { n, data: vec![Scalar::zero(); row_start(n)] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(&Sequence::ones(n)?)
    }

    pub fn diagonal(values: &Sequence) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for i in 1..=values.len() {
            m.set(i, i, values.get(i).clone());
        }
        Ok(m)
    }

    /// Builds from zero-based `(row, col)` with `col <= row`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        let mut data = Vec::with_capacity(row_start(n));
        for i in 0..n {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        Ok(Self { n, data })
    }

    /// Builds from explicit rows; row `i` (one-based) must hold exactly `i` entries.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        let mut data = Vec::with_capacity(row_start(n));
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::LengthMismatch { expected: i + 1, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    fn from_row_vecs(n: usize, rows: Vec<Vec<Scalar>>) -> Self {
        let mut data = Vec::with_capacity(row_start(n));
        for row in rows {
            data.extend(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`; zero above the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> Result<Scalar> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        Ok(if j > i { Scalar::zero() } else { self.data[row_start(i - 1) + j - 1].clone() })
    }

    /// Borrowing access for `j <= i`; panics outside the stored triangle.
    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        assert!(j >= 1 && j <= i && i <= self.n, "({i}, {j}) outside lower triangle of {}", self.n);
        &self.data[row_start(i - 1) + j - 1]
    }

    fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[row_start(i - 1) + j - 1] = v;
    }

    /// Row `i` truncated at the diagonal (`i` entries).
    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[row_start(i - 1)..row_start(i)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        (1..=self.n).map(move |i| self.row(i))
    }

    pub fn is_identity(&self) -> bool {
        self.rows().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
        })
    }

    pub fn scale(&self, c: &Scalar) -> TriMatrix {
        Self { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// Dense triangular product; (AB)_{ij} = sum_{l=j..i} A_{il} B_{lj}.
    pub fn mul_dense(&self, rhs: &TriMatrix) -> Result<TriMatrix> {
        check_dims(self.n, rhs.n)?;
        let n = self.n;
        let row = |i: usize| -> Vec<Scalar> {
            let a = self.row(i);
            (1..=i)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for l in j..=i {
                        let b = rhs.at(l, j);
                        if !b.is_zero() && !a[l - 1].is_zero() {
                            acc += &a[l - 1] * b;
                        }
                    }
                    acc
                })
                .collect()
        };
        Ok(Self::from_row_vecs(n, map_rows(n, row)))
    }

    /// `M · S_f`, using the suffix recurrence
    /// (M S_f)_{i,j} = (M S_f)_{i,j+1} + M_{i,j} f(j) evaluated right to left.
    pub fn mul_s(&self, f: &Sequence) -> Result<TriMatrix> {
        check_dims(self.n, f.len())?;
        let row = |i: usize| -> Vec<Scalar> {
            let m = self.row(i);
            let mut out = vec![Scalar::zero(); i];
            let mut acc = Scalar::zero();
            for j in (1..=i).rev() {
                acc += &m[j - 1] * f.get(j);
                out[j - 1] = acc.clone();
            }
            out
        };
        Ok(Self::from_row_vecs(self.n, map_rows(self.n, row)))
    }

    /// `M · A_f` where A_f = Δ S_f:
    /// (M A_f)_{i,i} = 0, (M A_f)_{i,j} = (M A_f)_{i,j+1} + M_{i,j+1} f(j).
    pub fn mul_a(&self, f: &Sequence) -> Result<TriMatrix> {
        check_dims(self.n, f.len())?;
        let row = |i: usize| -> Vec<Scalar> {
            let m = self.row(i);
            let mut out = vec![Scalar::zero(); i];
            let mut acc = Scalar::zero();
            for j in (1..i).rev() {
                acc += &m[j] * f.get(j);
                out[j - 1] = acc.clone();
            }
            out
        };
        Ok(Self::from_row_vecs(self.n, map_rows(self.n, row)))
    }

    /// `M · Δ`: column j of the result is column j+1 of M.
    pub fn mul_shift(&self) -> TriMatrix {
        let row = |i: usize| -> Vec<Scalar> {
            let m = self.row(i);
            let mut out: Vec<Scalar> = m[1..].to_vec();
            out.push(Scalar::zero());
            out
        };
        Self::from_row_vecs(self.n, (1..=self.n).map(row).collect())
    }

    /// `M · P`: suffix sums along each row.
    pub fn mul_prefix(&self) -> TriMatrix {
        let row = |i: usize| -> Vec<Scalar> {
            let m = self.row(i);
            let mut out = vec![Scalar::zero(); i];
            let mut acc = Scalar::zero();
            for j in (1..=i).rev() {
                acc += &m[j - 1];
                out[j - 1] = acc.clone();
            }
            out
        };
        Self::from_row_vecs(self.n, map_rows(self.n, row))
    }

    /// Nonnegative integer power by repeated squaring.
    pub fn pow(&self, k: u32) -> TriMatrix {
        let mut result = TriMatrix::identity(self.n).expect("dimension >= 1");
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_dense(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_dense(&base).expect("same dimension");
            }
        }
        result
    }

    /// Rows as canonical strings, truncated at the diagonal.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows().map(|r| r.iter().map(format_scalar).collect()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

fn map_rows<F>(n: usize, row: F) -> Vec<Vec<Scalar>>
where
    F: Fn(usize) -> Vec<Scalar> + Sync + Send,
{
    if n >= PARALLEL_ROWS {
        (1..=n).into_par_iter().map(row).collect()
    } else {
        (1..=n).map(row).collect()
    }
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_string_rows()).finish()
    }
}

impl Serialize for TriMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TriMatrix", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("rows", &self.to_string_rows())?;
        st.end()
    }
}

impl Add for &TriMatrix {
    type Output = TriMatrix;
    fn add(self, rhs: &TriMatrix) -> TriMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        TriMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &TriMatrix {
    type Output = TriMatrix;
    fn sub(self, rhs: &TriMatrix) -> TriMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        TriMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// A lower-triangular matrix held in whatever form makes products cheapest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structured {
    /// `S_f`: row `i` holds `f(i)` in columns `1..=i`.
    S(Sequence),
    /// `A_f = Δ S_f`: row `i` holds `f(i-1)` in columns `1..i`.
    A(Sequence),
    /// `Δ`: ones on the first subdiagonal.
    Shift(usize),
    /// `P`: ones on and below the diagonal.
    Prefix(usize),
    Dense(TriMatrix),
}

impl Structured {
    pub fn s_of(f: &Sequence) -> Self {
        Structured::S(f.clone())
    }

    pub fn a_of(f: &Sequence) -> Self {
        Structured::A(f.clone())
    }

    pub fn shift(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        Ok(Structured::Shift(n))
    }

    pub fn prefix(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        Ok(Structured::Prefix(n))
    }

    pub fn dim(&self) -> usize {
        match self {
            Structured::S(f) | Structured::A(f) => f.len(),
            Structured::Shift(n) | Structured::Prefix(n) => *n,
            Structured::Dense(m) => m.dim(),
        }
    }

    pub fn materialize(&self) -> TriMatrix {
        let n = self.dim();
        let one = Scalar::one;
        let built = match self {
            Structured::S(f) => TriMatrix::from_fn(n, |i, _| f.get(i + 1).clone()),
            Structured::A(f) => {
                TriMatrix::from_fn(n, |i, j| if j < i { f.get(i).clone() } else { Scalar::zero() })
            }
            Structured::Shift(_) => {
                TriMatrix::from_fn(n, |i, j| if j + 1 == i { one() } else { Scalar::zero() })
            }
            Structured::Prefix(_) => TriMatrix::from_fn(n, |_, _| one()),
            Structured::Dense(m) => return m.clone(),
        };
        built.expect("dimension >= 1")
    }

    /// Entry `(i, j)` without materializing.
    pub fn entry(&self, i: usize, j: usize) -> Result<Scalar> {
        let n = self.dim();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        Ok(match self {
            Structured::Dense(m) => return m.entry(i, j),
            _ if j > i => Scalar::zero(),
            Structured::S(f) => f.get(i).clone(),
            Structured::A(f) if j < i => f.get(i - 1).clone(),
            Structured::Shift(_) if j + 1 == i => Scalar::one(),
            Structured::Prefix(_) => Scalar::one(),
            _ => Scalar::zero(),
        })
    }

    /// `self · rhs`, exploiting the structure of the right factor when it has one.
    pub fn mul(&self, rhs: &Structured) -> Result<TriMatrix> {
        check_dims(self.dim(), rhs.dim())?;
        match rhs {
            Structured::Dense(r) => left_mul(self, r),
            _ => right_mul(&self.materialize(), rhs),
        }
    }
}

impl From<TriMatrix> for Structured {
    fn from(m: TriMatrix) -> Self {
        Structured::Dense(m)
    }
}

/// `left · rhs` for a materialized left factor and any right factor.
pub fn right_mul(left: &TriMatrix, rhs: &Structured) -> Result<TriMatrix> {
    check_dims(left.dim(), rhs.dim())?;
    match rhs {
        Structured::S(f) => left.mul_s(f),
        Structured::A(f) => left.mul_a(f),
        Structured::Shift(_) => Ok(left.mul_shift()),
        Structured::Prefix(_) => Ok(left.mul_prefix()),
        Structured::Dense(r) => left.mul_dense(r),
    }
}

/// `lhs · right` for any left factor and a materialized right factor.
fn left_mul(lhs: &Structured, right: &TriMatrix) -> Result<TriMatrix> {
    check_dims(lhs.dim(), right.dim())?;
    let n = right.dim();
    // Column prefix sums: (P M)_{i,j} = sum_{l=j..i} M_{l,j}.
    let prefix_rows = || -> Vec<Vec<Scalar>> {
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 1..=n {
            let cur = right.row(i);
            let mut row: Vec<Scalar> = Vec::with_capacity(i);
            for j in 1..=i {
                let above = if j < i { rows[i - 2][j - 1].clone() } else { Scalar::zero() };
                row.push(above + &cur[j - 1]);
            }
            rows.push(row);
        }
        rows
    };
    let shifted = |rows: Vec<Vec<Scalar>>, scale: Option<&Sequence>| -> TriMatrix {
        // Row i of Δ X is row i-1 of X, padded to length i.
        let mut out = Vec::with_capacity(n);
        out.push(vec![Scalar::zero()]);
        for (idx, mut row) in rows.into_iter().take(n - 1).enumerate() {
            if let Some(f) = scale {
                let c = f.get(idx + 1);
                row.iter_mut().for_each(|v| *v *= c);
            }
            row.push(Scalar::zero());
            out.push(row);
        }
        TriMatrix::from_row_vecs(n, out)
    };
    Ok(match lhs {
        Structured::Dense(l) => l.mul_dense(right)?,
        Structured::Prefix(_) => TriMatrix::from_row_vecs(n, prefix_rows()),
        Structured::S(f) => {
            let mut rows = prefix_rows();
            for (idx, row) in rows.iter_mut().enumerate() {
                let c = f.get(idx + 1);
                row.iter_mut().for_each(|v| *v *= c);
            }
            TriMatrix::from_row_vecs(n, rows)
        }
        Structured::A(f) => shifted(prefix_rows(), Some(f)),
        Structured::Shift(_) => shifted(right.rows().map(<[Scalar]>::to_vec).collect(), None),
    })
}

/// Left-to-right product of a chain of factors.
pub fn chain_product(first: &Structured, rest: &[Structured]) -> Result<TriMatrix> {
    let mut acc = first.materialize();
    for factor in rest {
        acc = right_mul(&acc, factor)?;
    }
    Ok(acc)
}
