//! Random exact inputs for randomized verification runs.

use std::collections::HashSet;

use rand::Rng;

use crate::scalar::{ratio, Scalar, Sequence};

/// Largest numerator and denominator magnitude drawn by default.
pub const DEFAULT_RANGE: i64 = 9;

/// `p/q` with `p` in `[-9, 9] \ {0}` and `q` in `[1, 9]`; never zero.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    random_scalar_in(rng, DEFAULT_RANGE)
}

pub fn random_scalar_in<R: Rng + ?Sized>(rng: &mut R, range: i64) -> Scalar {
    let mut num = rng.gen_range(1..=range);
    if rng.gen_bool(0.5) {
        num = -num;
    }
    ratio(num, rng.gen_range(1..=range))
}

/// Nonzero entries, repeats allowed.
pub fn random_sequence<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Sequence {
    Sequence::new((0..len).map(|_| random_scalar(rng)).collect()).expect("len >= 1")
}

/// Pairwise distinct nonzero entries. The range widens with `len` so long
/// sequences can always be filled.
pub fn random_distinct_sequence<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Sequence {
    let range = DEFAULT_RANGE.max(len as i64);
    let mut seen = HashSet::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    while values.len() < len {
        let x = random_scalar_in(rng, range);
        if seen.insert(x.clone()) {
            values.push(x);
        }
    }
    Sequence::new(values).expect("len >= 1")
}
