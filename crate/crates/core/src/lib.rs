//! Exact evaluation of multiplicative nested sums
//!
//! ```text
//! S(f_1, ..., f_k; N, m) = Σ_{N ≥ n_1 ≥ ... ≥ n_k ≥ m} f_1(n_1) ⋯ f_k(n_k)
//! A(f_1, ..., f_k; N, m) = Σ_{N > n_1 > ... > n_k ≥ m} f_1(n_1) ⋯ f_k(n_k)
//! ```
//!
//! as entries of products of lower-triangular index matrices,
//! `S = (P · S_{f_1} ⋯ S_{f_k})_{N,m}` and `A = (P · A_{f_1} ⋯ A_{f_k})_{N,m}`,
//! together with exact verifiers for the algebraic identities those matrices
//! satisfy, their closed-form diagonalization, the random-walk reading of
//! `S_{1/x^a}`, and several combinatorial identities that follow.
//!
//! Everything exact is computed over arbitrary-precision rationals; floats
//! appear only in [`nested_sum::converge_stream`] and the Monte Carlo walk.

pub mod algebra;
pub mod error;
pub mod identities;
pub mod matrix;
pub mod nested_sum;
pub mod random;
pub mod scalar;
pub mod walk;

pub use algebra::{
    check_partial_fraction, check_three_factor_identity, check_two_factor_identity, eigendecompose,
    inverse_s, power_via_diag, EigenDecomposition,
};
pub use error::{Error, Result};
pub use identities::{
    butler_karasik_g, dilcher_rhs, general_dilcher_rhs, symmetric_expansion, verify_butler_karasik,
    verify_sa_three, verify_sa_two, GTable, IdentityReport,
};
pub use matrix::{Structured, TriMatrix};
pub use nested_sum::{
    converge_stream, evaluate_bruteforce, evaluate_matrix, evaluate_table, harmonic_h, harmonic_s, Mode,
    SumSpec, SumTable,
};
pub use scalar::{format_scalar, parse_scalar, Scalar, Sequence};
pub use walk::{
    absorption_probability_exact, absorption_probability_montecarlo, build_chain, MonteCarloEstimate,
    WalkChain,
};
