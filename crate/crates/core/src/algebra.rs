//! Closed forms for the index matrix `S_a`: its bidiagonal inverse, the two-
//! and three-factor product identities, and the explicit diagonalization
//! `S_a = D_a diag(a_1..a_N) E_a` valid when the `a_j` are pairwise distinct.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Structured, TriMatrix};
use crate::scalar::{pow, Scalar, Sequence};

/// `S_a^{-1}`: `1/a_i` on the diagonal and `-1/a_{i-1}` on the subdiagonal.
pub fn inverse_s(a: &Sequence) -> Result<TriMatrix> {
    a.require_nonzero()?;
    TriMatrix::from_fn(a.len(), |i, j| {
        if i == j {
            a.get(i + 1).recip()
        } else if j + 1 == i {
            -a.get(i).recip()
        } else {
            Scalar::zero()
        }
    })
}

fn check_lengths(seqs: &[&Sequence]) -> Result<usize> {
    let n = seqs[0].len();
    for s in &seqs[1..] {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: s.len() });
        }
    }
    Ok(n)
}

/// Both sides of `S_a^{-1} S_{ab} S_b^{-1} = I - Δ`.
pub fn two_factor_sides(a: &Sequence, b: &Sequence) -> Result<(TriMatrix, TriMatrix)> {
    let n = check_lengths(&[a, b])?;
    let ab = a.pointwise_product(b)?;
    let lhs = inverse_s(a)?.mul_s(&ab)?.mul_dense(&inverse_s(b)?)?;
    let rhs = &TriMatrix::identity(n)? - &Structured::Shift(n).materialize();
    Ok((lhs, rhs))
}

pub fn check_two_factor_identity(a: &Sequence, b: &Sequence) -> Result<bool> {
    let (lhs, rhs) = two_factor_sides(a, b)?;
    Ok(lhs == rhs)
}

/// Both sides of
/// `S_a Δ S_b Δ S_c + S_ab Δ S_c + S_a Δ S_bc + S_abc = S_a S_b S_c`.
pub fn three_factor_sides(a: &Sequence, b: &Sequence, c: &Sequence) -> Result<(TriMatrix, TriMatrix)> {
    check_lengths(&[a, b, c])?;
    let ab = a.pointwise_product(b)?;
    let bc = b.pointwise_product(c)?;
    let abc = ab.pointwise_product(c)?;
    let sa = Structured::S(a.clone()).materialize();
    let sab = Structured::S(ab).materialize();
    // Δ S_x = A_x, so each "Δ S_x" on the right is a single A multiplication.
    let t1 = sa.mul_a(b)?.mul_a(c)?;
    let t2 = sab.mul_a(c)?;
    let t3 = sa.mul_a(&bc)?;
    let t4 = Structured::S(abc).materialize();
    let lhs = &(&(&t1 + &t2) + &t3) + &t4;
    let rhs = sa.mul_s(b)?.mul_s(c)?;
    Ok((lhs, rhs))
}

pub fn check_three_factor_identity(a: &Sequence, b: &Sequence, c: &Sequence) -> Result<bool> {
    let (lhs, rhs) = three_factor_sides(a, b, c)?;
    Ok(lhs == rhs)
}

/// `S_a = D · diag(λ) · E` with `E = D^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenDecomposition {
    pub d: TriMatrix,
    pub lambda: Sequence,
    pub e: TriMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `D · diag(λ^k) · E`.
    pub fn power(&self, k: u32) -> TriMatrix {
        let powered =
            Sequence::new(self.lambda.values().iter().map(|x| pow(x, k)).collect()).expect("nonempty");
        self.reconstruct_with(&powered)
    }

    pub fn reconstruct(&self) -> TriMatrix {
        self.reconstruct_with(&self.lambda)
    }

    fn reconstruct_with(&self, diag: &Sequence) -> TriMatrix {
        // D · diag scales column j of D by diag_j.
        let scaled = TriMatrix::from_fn(self.dim(), |i, j| self.d.at(i + 1, j + 1) * diag.get(j + 1))
            .expect("dimension >= 1");
        scaled.mul_dense(&self.e).expect("same dimension")
    }

    /// `D · E = I`.
    pub fn inverse_condition_holds(&self) -> bool {
        self.d.mul_dense(&self.e).map(|m| m.is_identity()).unwrap_or(false)
    }

    /// Row `i` of `S_a D_{·,j} = a_j D_{·,j}`, for every `j` and `i >= j`:
    /// `a_i sum_{l=j..i} d_{l,j} = a_j d_{i,j}`.
    pub fn eigenvector_condition_holds(&self) -> bool {
        let n = self.dim();
        let a = &self.lambda;
        (1..=n).all(|j| {
            let mut column_sum = Scalar::zero();
            (j..=n).all(|i| {
                column_sum += self.d.at(i, j);
                a.get(i) * &column_sum == a.get(j) * self.d.at(i, j)
            })
        })
    }
}

/// Closed-form eigenvectors of `S_a` for distinct nonzero `a`:
///
/// ```text
/// d_{i,j} = (a_i / a_N) ∏_{k=i+1..N} (1 - a_k / a_j)
/// e_{i,j} = (a_N / a_i) ∏_{k=j..N, k≠i} 1 / (1 - a_k / a_i)
/// ```
///
/// for `i >= j`, zero otherwise.
pub fn eigendecompose(a: &Sequence) -> Result<EigenDecomposition> {
    a.require_distinct_nonzero()?;
    let n = a.len();
    let a_n = a.get(n);

    // Column j of D is built bottom-up from the running product.
    let d_cols: Vec<Vec<Scalar>> = (1..=n)
        .into_par_iter()
        .map(|j| {
            let inv_aj = a.get(j).recip();
            let mut col = vec![Scalar::zero(); n - j + 1];
            let mut prod = Scalar::one();
            for i in (j..=n).rev() {
                col[i - j] = a.get(i) / a_n * &prod;
                prod *= Scalar::one() - a.get(i) * &inv_aj;
            }
            col
        })
        .collect();
    let d = TriMatrix::from_fn(n, |i, j| d_cols[j][i - j].clone())?;

    // Row i of E: the product over k = j..N (k ≠ i) shrinks as j grows.
    let e_rows: Vec<Vec<Scalar>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let inv_ai = a.get(i).recip();
            let factor = |k: usize| Scalar::one() - a.get(k) * &inv_ai;
            let mut prod = Scalar::one();
            for k in (i + 1)..=n {
                prod *= factor(k);
            }
            let mut row = vec![Scalar::zero(); i];
            let lead = a_n * &inv_ai;
            for j in (1..=i).rev() {
                if j < i {
                    prod *= factor(j);
                }
                row[j - 1] = &lead / &prod;
            }
            row
        })
        .collect();
    let e = TriMatrix::from_rows(e_rows)?;

    Ok(EigenDecomposition { d, lambda: a.clone(), e })
}

/// `(S_a)^k` through the diagonalization.
pub fn power_via_diag(a: &Sequence, k: u32) -> Result<TriMatrix> {
    Ok(eigendecompose(a)?.power(k))
}

/// `sum_{t=j..i} ∏_{k=j..i, k≠t} 1/(a_t - a_k)`.
pub fn partial_fraction_sum(a: &Sequence, i: usize, j: usize) -> Result<Scalar> {
    if j == 0 || j > i || i > a.len() {
        return Err(Error::IndexOutOfRange { i, j, n: a.len() });
    }
    let window = Sequence::new(a.values()[j - 1..i].to_vec())?;
    if let Some((first, second)) = window.first_duplicate() {
        return Err(Error::DuplicateEntries { first: first + j - 1, second: second + j - 1 });
    }
    let mut total = Scalar::zero();
    for t in j..=i {
        let mut denom = Scalar::one();
        for k in (j..=i).filter(|&k| k != t) {
            denom *= a.get(t) - a.get(k);
        }
        total += denom.recip();
    }
    Ok(total)
}

/// Whether the partial-fraction sum equals `δ_{i,j}`.
pub fn check_partial_fraction(a: &Sequence, i: usize, j: usize) -> Result<bool> {
    let expected = if i == j { Scalar::one() } else { Scalar::zero() };
    Ok(partial_fraction_sum(a, i, j)? == expected)
}
