//! Leftward random walk on sites `1..=N`.
//!
//! From site `l` the walker jumps to each of `1..=l` with probability `1/l^a`.
//! For `a = 1` these rows are exactly `S_{H_1}`; for `a > 1` the missing mass
//! `1 - 1/l^(a-1)` flows to an extra absorbing state `R`. Site 1 is absorbing
//! in both cases, and the probability of sitting at site 1 after `k + 1` steps
//! from site `N` is `((S_{H_a})^{k+1})_{N,1}`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, int, pow, to_f64, Scalar, Sequence};

/// Samples simulated per RNG stream. Part of the reproducibility contract:
/// changing it changes every Monte Carlo estimate.
pub const CHUNK_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkChain {
    n: usize,
    a: u32,
    transition: Vec<Vec<Scalar>>,
}

/// Builds the transition matrix. States are `1..=N`, followed by `R` when `a > 1`.
pub fn build_chain(n: usize, a: u32) -> Result<WalkChain> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    if a == 0 {
        return Err(Error::InvalidExponent(a));
    }
    let states = if a > 1 { n + 1 } else { n };
    let mut transition = vec![vec![Scalar::zero(); states]; states];
    for l in 1..=n {
        let step = Scalar::new(1.into(), num_traits::pow(num_bigint::BigInt::from(l), a as usize));
        for j in 1..=l {
            transition[l - 1][j - 1] = step.clone();
        }
        if a > 1 {
            transition[l - 1][n] = Scalar::one() - &step * int(l as i64);
        }
    }
    if a > 1 {
        transition[n][n] = Scalar::one();
    }
    Ok(WalkChain { n, a, transition })
}

impl WalkChain {
    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> u32 {
        self.a
    }

    pub fn has_sink(&self) -> bool {
        self.a > 1
    }

    pub fn states(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<Scalar>] {
        &self.transition
    }

    /// `P(i -> j)`, one-based; state `N + 1` is the sink `R` when present.
    pub fn probability(&self, i: usize, j: usize) -> Result<&Scalar> {
        let s = self.states();
        if i == 0 || j == 0 || i > s || j > s {
            return Err(Error::IndexOutOfRange { i, j, n: s });
        }
        Ok(&self.transition[i - 1][j - 1])
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.transition.iter().all(|row| {
            row.iter().all(|p| !crate::scalar::is_negative(p) && p <= &Scalar::one())
                && row.iter().sum::<Scalar>().is_one()
        })
    }

    /// The `power`-th power of the full transition matrix.
    pub fn transition_power(&self, power: u32) -> Vec<Vec<Scalar>> {
        let s = self.states();
        let mut result: Vec<Vec<Scalar>> =
            (0..s).map(|i| (0..s).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
        for _ in 0..power {
            result = square_mul(&result, &self.transition);
        }
        result
    }

    /// Row CDFs in double precision, computed once per simulation.
    fn float_cdfs(&self) -> Vec<Vec<f64>> {
        self.transition
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero();
                let mut cdf: Vec<f64> = row
                    .iter()
                    .map(|p| {
                        acc += p;
                        to_f64(&acc)
                    })
                    .collect();
                // Exact row sums are 1; pin the tail so rounding never lets a
                // draw land past the last reachable state.
                if let Some(last) = row.iter().rposition(|p| !p.is_zero()) {
                    cdf[last..].iter_mut().for_each(|c| *c = 1.0);
                }
                cdf
            })
            .collect()
    }
}

fn square_mul(x: &[Vec<Scalar>], y: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let s = x.len();
    (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for l in 0..s {
                        if !x[i][l].is_zero() && !y[l][j].is_zero() {
                            acc += &x[i][l] * &y[l][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `((S_{H_a})^{k+1})_{N,1}`.
///
/// Row `N` of the power is obtained by pushing the unit row vector `e_N`
/// through `k + 1` right multiplications by `S_{H_a}`, each a suffix sum.
pub fn absorption_probability_exact(n: usize, a: u32, k: u32) -> Result<Scalar> {
    if a == 0 {
        return Err(Error::InvalidExponent(a));
    }
    let h = Sequence::inverse_power(a, n)?;
    let mut row = vec![Scalar::zero(); n];
    row[n - 1] = Scalar::one();
    for _ in 0..=k {
        let mut acc = Scalar::zero();
        for j in (1..=n).rev() {
            if !row[j - 1].is_zero() {
                acc += &row[j - 1] * h.get(j);
            }
            row[j - 1] = acc.clone();
        }
    }
    Ok(row.swap_remove(0))
}

/// `N^a · ((S_{H_a})^{k+1})_{N,1}`, which equals `S(H_a, ..., H_a; N, 1)`.
pub fn scaled_absorption(n: usize, a: u32, k: u32) -> Result<Scalar> {
    Ok(absorption_probability_exact(n, a, k)? * pow(&int(n as i64), a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
}

impl MonteCarloEstimate {
    /// `|estimate - exact|` in units of the standard error; infinite when the
    /// standard error is zero and the estimate misses.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (self.estimate - exact).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Simulates `samples` independent `(k+1)`-step walks from site `N` and
/// counts those sitting at site 1 at the end.
///
/// Samples are split into chunks of [`CHUNK_SAMPLES`]; chunk `c` draws from
/// ChaCha8 stream `c` keyed by `seed`, so the result depends only on
/// `(n, a, k, samples, seed)` and not on thread scheduling.
pub fn absorption_probability_montecarlo(
    n: usize,
    a: u32,
    k: u32,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    let chain = build_chain(n, a)?;
    let cdfs = chain.float_cdfs();
    let steps = k as u64 + 1;
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK_SAMPLES.min(samples - c * CHUNK_SAMPLES);
            let mut hits = 0u64;
            for _ in 0..count {
                let mut state = n - 1;
                for _ in 0..steps {
                    let u: f64 = rng.gen();
                    let cdf = &cdfs[state];
                    state = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                }
                if state == 0 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let stderr = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(MonteCarloEstimate { estimate: p, stderr, samples, seed, hits })
}

/// The JSON record emitted by the `walk` command.
#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    pub exact: String,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl WalkReport {
    pub fn new(exact: &Scalar, mc: &MonteCarloEstimate) -> Self {
        Self {
            exact: format_scalar(exact),
            estimate: mc.estimate,
            stderr: mc.stderr,
            samples: mc.samples,
            seed: mc.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn chain_a1() {
        let c = build_chain(2, 1).unwrap();
        assert_eq!(c.transition(), &[vec![int(1), int(0)], vec![ratio(1, 2), ratio(1, 2)]]);
        let c = build_chain(5, 1).unwrap();
        for l in 1..=5 {
            for j in 1..=5 {
                let expect = if j <= l { ratio(1, l as i64) } else { int(0) };
                assert_eq!(c.probability(l, j).unwrap(), &expect);
            }
        }
        assert!(!c.has_sink());
    }

    #[test]
    fn chain_with_sink() {
        let c = build_chain(2, 2).unwrap();
        assert_eq!(
            c.transition(),
            &[
                vec![int(1), int(0), int(0)],
                vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
                vec![int(0), int(0), int(1)],
            ]
        );
        assert!(c.is_row_stochastic());
        assert!(c.probability(4, 1).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(absorption_probability_exact(2, 1, 1).unwrap(), ratio(3, 4));
        assert_eq!(absorption_probability_exact(2, 2, 1).unwrap(), ratio(5, 16));
        assert_eq!(scaled_absorption(2, 2, 1).unwrap(), ratio(5, 4));
        for a in 1..4 {
            for k in 0..4 {
                assert_eq!(absorption_probability_exact(1, a, k).unwrap(), int(1));
            }
        }
        assert!(absorption_probability_exact(0, 1, 1).is_err());
    }

    #[test]
    fn monte_carlo_single_site() {
        let mc = absorption_probability_montecarlo(1, 3, 4, 1000, 9).unwrap();
        assert_eq!(mc.estimate, 1.0);
        assert_eq!(mc.stderr, 0.0);
        assert_eq!(mc.z_score(1.0), 0.0);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = absorption_probability_montecarlo(4, 2, 2, 200_000, 5).unwrap();
        let b = absorption_probability_montecarlo(4, 2, 2, 200_000, 5).unwrap();
        assert_eq!(a, b);
        let c = absorption_probability_montecarlo(4, 2, 2, 200_000, 6).unwrap();
        assert_ne!(a.hits, c.hits);
        assert!(absorption_probability_montecarlo(4, 2, 2, 0, 5).is_err());
    }
}
