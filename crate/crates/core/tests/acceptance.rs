//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary under
//! `cargo test` and exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use mns_core::algebra::{self, eigendecompose, power_via_diag};
use mns_core::identities::{self, dilcher_rhs, general_dilcher_rhs};
use mns_core::matrix::{Structured, TriMatrix};
use mns_core::nested_sum::{converge_stream, evaluate_bruteforce, evaluate_matrix, harmonic_s, Mode, SumSpec};
use mns_core::random::{random_distinct_sequence, random_sequence};
use mns_core::scalar::{to_f64, Sequence};
use mns_core::walk::{absorption_probability_exact, absorption_probability_montecarlo, scaled_absorption};
use mns_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(id: &str, title: &str, budget: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let ok = outcome.ok && in_budget;
    let budget_note = budget.map(|b| format!(" (budget {:.0?})", b)).unwrap_or_default();
    println!(
        "[{}] {id} {title}: {} in {:.2?}{budget_note}",
        if ok { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed
    );
    ok
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c1_oracle_equivalence() -> Outcome {
    let mut rng = rng(1);
    let mut compared = 0;
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(0..=4);
        let mode = if rng.gen_bool(0.5) { Mode::Weak } else { Mode::Strict };
        let factors: Vec<Sequence> = (0..k).map(|_| random_sequence(&mut rng, n)).collect();
        for m in 1..=n {
            let spec = SumSpec::new(factors.clone(), n, m, mode).unwrap();
            compared += 1;
            if evaluate_matrix(&spec) != evaluate_bruteforce(&spec).unwrap() {
                mismatches += 1;
            }
        }
    }
    Outcome { ok: mismatches == 0, detail: format!("500 specs, {compared} (N,m) pairs, {mismatches} mismatches") }
}

fn c2_matrix_identities() -> Outcome {
    let mut rng = rng(2);
    let (mut two, mut three, mut pf) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let (a, b, c) = (random_sequence(&mut rng, n), random_sequence(&mut rng, n), random_sequence(&mut rng, n));
        two += algebra::check_two_factor_identity(&a, &b).unwrap() as usize;
        three += algebra::check_three_factor_identity(&a, &b, &c).unwrap() as usize;
    }
    let mut pairs = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let a = random_distinct_sequence(&mut rng, n);
        let all = (1..=n).all(|i| {
            (1..=i).all(|j| {
                pairs += 1;
                algebra::check_partial_fraction(&a, i, j).unwrap()
            })
        });
        pf += all as usize;
    }
    Outcome {
        ok: two == 100 && three == 100 && pf == 100,
        detail: format!("two-factor {two}/100, three-factor {three}/100, partial-fraction {pf}/100 ({pairs} (i,j) pairs)"),
    }
}

fn c3_eigendecomposition() -> Outcome {
    let mut rng = rng(3);
    let mut good = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let a = random_distinct_sequence(&mut rng, n);
        let ed = eigendecompose(&a).unwrap();
        let s = Structured::S(a.clone()).materialize();
        let mut ok = ed.inverse_condition_holds() && ed.reconstruct() == s;
        let mut folded = TriMatrix::identity(n).unwrap();
        for k in 0..=5 {
            ok &= power_via_diag(&a, k).unwrap() == folded;
            folded = folded.mul_dense(&s).unwrap();
        }
        good += ok as usize;
    }
    Outcome { ok: good == 50, detail: format!("{good}/50 sequences: D·E = I, D·diag·E = S_a, powers k <= 5") }
}

fn c4_truncated_relations() -> Outcome {
    let mut rng = rng(4);
    let (mut two, mut three) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(1..n);
        let (f, g, h) = (random_sequence(&mut rng, n), random_sequence(&mut rng, n), random_sequence(&mut rng, n));
        two += identities::verify_sa_two(&f, &g, n, m).unwrap().equal as usize;
        three += identities::verify_sa_three(&f, &g, &h, n, m).unwrap().equal as usize;
    }
    Outcome { ok: two == 200 && three == 200, detail: format!("two-term {two}/200, three-term {three}/200") }
}

fn c5_random_walk_exact() -> Outcome {
    let mut failures = 0;
    let mut checked = 0;
    for n in 1..=20 {
        for k in 0..=5u32 {
            let scaled = scaled_absorption(n, 1, k).unwrap();
            checked += 1;
            failures += (scaled != harmonic_s(&vec![1; k as usize], n).unwrap()) as usize;
        }
    }
    for a in 1..=3u32 {
        for n in 1..=12 {
            for k in 0..=4u32 {
                let factors = vec![Sequence::inverse_power(a, n).unwrap(); k as usize];
                let sum = evaluate_matrix(&SumSpec::weak(factors, n, 1).unwrap());
                checked += 1;
                failures += (scaled_absorption(n, a, k).unwrap() != sum) as usize;
            }
        }
    }
    Outcome { ok: failures == 0, detail: format!("{checked} exact identities, {failures} failures") }
}

fn c5_random_walk_monte_carlo() -> Outcome {
    let cases = [(2usize, 1u32, 1u32), (5, 2, 2)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, a, k) in cases {
        let exact = to_f64(&absorption_probability_exact(n, a, k).unwrap());
        let inside = (1..=20u64)
            .filter(|&seed| {
                let mc = absorption_probability_montecarlo(n, a, k, 1_000_000, seed).unwrap();
                mc.z_score(exact) <= 4.0
            })
            .count();
        ok &= inside >= 19;
        parts.push(format!("(N={n},a={a},k={k}) {inside}/20 seeds within 4 stderr"));
    }
    Outcome { ok, detail: parts.join(", ") }
}

fn c6_combinatorial() -> Outcome {
    let mut dil = 0;
    for n in 1..=15 {
        for k in 0..=4u32 {
            dil += (dilcher_rhs(n, k).unwrap() == harmonic_s(&vec![1; k as usize], n).unwrap()) as usize;
        }
    }
    let mut gen = 0;
    for a in 1..=3u32 {
        for n in 1..=10 {
            for k in 0..=4u32 {
                gen += (general_dilcher_rhs(a, n, k).unwrap() == harmonic_s(&vec![a as i64; k as usize], n).unwrap())
                    as usize;
            }
        }
    }
    let mut rng = rng(6);
    let mut bk = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let a = random_sequence(&mut rng, n);
        bk += (1..=4).all(|k| identities::verify_butler_karasik(&a, n, k).unwrap().equal) as usize;
    }
    let mut sym = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let a = random_distinct_sequence(&mut rng, n);
        sym += (0..=5).all(|k| identities::verify_symmetric_expansion(&a, k).unwrap().equal) as usize;
    }
    Outcome {
        ok: dil == 75 && gen == 150 && bk == 100 && sym == 50,
        detail: format!("Dilcher {dil}/75, generalized {gen}/150, Butler-Karasik {bk}/100, symmetric {sym}/50"),
    }
}

fn c7_convergence() -> Outcome {
    let target: f64 = 2.0 * (1..=1_000_000u64).map(|n| 1.0 / (n as f64).powi(3)).sum::<f64>();
    let value = converge_stream(&[2, 1], 2000, &[2000]).unwrap()[0].1;
    let err = (value - target).abs();
    Outcome { ok: err <= 0.01, detail: format!("S(1/x^2,1/x;2000,1) = {value:.6}, 2ζ(3) ≈ {target:.6}, |diff| = {err:.2e} (tol 1e-2)") }
}

fn c8_performance() -> Outcome {
    let n = 400;
    let factors = vec![Sequence::harmonic(1, n).unwrap(); 6];
    let spec = SumSpec::weak(factors, n, 1).unwrap();
    let value = evaluate_matrix(&spec);
    let refused = matches!(evaluate_bruteforce(&spec), Err(Error::ExplosionGuard { .. }));
    Outcome {
        ok: refused,
        detail: format!(
            "S_{{1,1,1,1,1,1}}(400) ≈ {:.6} ({} denominator digits); brute force refused by guard: {refused}",
            to_f64(&value),
            value.denom().to_string().len()
        ),
    }
}

fn main() {
    println!("acceptance criteria");
    let results = [
        check("C1", "oracle equivalence", Some(Duration::from_secs(30)), c1_oracle_equivalence),
        check("C2", "matrix identity suites", Some(Duration::from_secs(10)), c2_matrix_identities),
        check("C3", "eigendecomposition", None, c3_eigendecomposition),
        check("C4", "truncated S/A relations", None, c4_truncated_relations),
        check("C5a", "random-walk exact identities", None, c5_random_walk_exact),
        check("C5b", "random-walk Monte Carlo", None, c5_random_walk_monte_carlo),
        check("C6", "combinatorial identities", None, c6_combinatorial),
        check("C7", "convergence to 2ζ(3)", Some(Duration::from_secs(5)), c7_convergence),
        check("C8", "structured path at k=6, N=400", Some(Duration::from_secs(5)), c8_performance),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
