use std::fmt::Write as _;
use std::fs;

use clap::{Args, ValueEnum};
use mns_core::identities::{self, IdentityReport};
use mns_core::nested_sum::{self, converge_csv, format_significant, geometric_checkpoints, Mode, SumSpec};
use mns_core::random::{random_distinct_sequence, random_sequence};
use mns_core::scalar::{format_scalar, parse_scalar, Sequence};
use mns_core::{algebra, walk, TriMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Cli, Command, Emission, FactorArgs, Failure, Format, ModeArg};

type Outcome = Result<Emission, Failure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    /// S_a^{-1} S_ab S_b^{-1} = I - Δ
    TwoFactor,
    /// S_a Δ S_b Δ S_c + S_ab Δ S_c + S_a Δ S_bc + S_abc = S_a S_b S_c
    ThreeFactor,
    /// sum_t prod_{k≠t} 1/(a_t - a_k) = δ_ij over every window j..i
    PartialFraction,
    /// S(f,g;N-1,m) = A(f,g;N,m) + A(fg;N,m)
    SaTwo,
    /// S(f,g,h;N-1,m) = A(f,g,h) + A(fg,h) + A(f,gh) + A(fgh)
    SaThree,
    /// S(a,...,a;N,1) = G(N+k, N)
    ButlerKarasik,
    /// S(a,...,a;N,1) = sum_j prod_{m≠j} 1/(1 - a_m/a_j) a_j^k
    SymmetricExpansion,
    /// D·E = I and D·diag(a)·E = S_a
    Eigen,
    /// S_{1,...,1}(N) = sum_l C(N,l) (-1)^(l-1) / l^k
    Dilcher,
    /// S_{a,...,a}(N) = sum_l prod_{n≠l} n^a/(n^a - l^a) / l^(ak)
    GeneralDilcher,
    /// N^a ((S_{H_a})^{k+1})_{N,1} = S(H_a,...,H_a;N,1)
    Walk,
    /// A randomized batch of every identity above
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub identity: Identity,
    /// Number of random instances (default 1 when no explicit inputs are given).
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest dimension for random instances.
    #[arg(long = "max-n", default_value_t = 8)]
    pub max_n: usize,
    /// Explicit sequence as comma-separated rationals; repeat for a, b, c (or f, g, h).
    #[arg(long = "seq", allow_hyphen_values = true)]
    pub seqs: Vec<String>,
    /// Sequence length for random instances.
    #[arg(long = "n")]
    pub len: Option<usize>,
    /// Upper bound N.
    #[arg(long = "N")]
    pub upper: Option<i64>,
    /// Lower bound m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Depth k.
    #[arg(long)]
    pub k: Option<u32>,
    /// Exponent a for general-dilcher and walk.
    #[arg(long)]
    pub a: Option<u32>,
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Sum { factors, m, table, bruteforce, guard } => {
            sum(cli.format.unwrap_or(Format::Plain), factors, *m, *table, bruteforce.then_some(*guard))
        }
        Command::Table { factors } => table(cli.format.unwrap_or(Format::Json), factors),
        Command::Verify(args) => verify(cli.format.unwrap_or(Format::Json), cli.seed, args),
        Command::Walk { n, a, k, samples } => walk_cmd(cli.format.unwrap_or(Format::Json), cli.seed, *n, *a, *k, *samples),
        Command::Converge { exponents, n, start } => converge(cli.format.unwrap_or(Format::Csv), exponents, *n, *start),
        Command::Eigen { a, power } => eigen(cli.format.unwrap_or(Format::Json), a, *power),
        Command::Inverse { a } => inverse(cli.format.unwrap_or(Format::Json), a),
    }
}

fn ok(text: String) -> Outcome {
    Ok(Emission { text, passed: true })
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn positive(name: &str, v: i64) -> Result<usize, Failure> {
    if v < 1 {
        return Err(usage(format!("{name} must be at least 1, got {v}")));
    }
    Ok(v as usize)
}

fn parse_list(items: &[String]) -> Result<Sequence, Failure> {
    let values = items.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(Sequence::new(values)?)
}

fn parse_seq_arg(text: &str) -> Result<Sequence, Failure> {
    let items: Vec<String> = text.split(',').map(str::to_string).collect();
    parse_list(&items)
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Weak => Mode::Weak,
        ModeArg::Strict => Mode::Strict,
    }
}

fn build_factors(args: &FactorArgs) -> Result<(Vec<Sequence>, usize), Failure> {
    let n = positive("N", args.n)?;
    let mut factors = args.indices.iter().map(|&i| Sequence::harmonic(i, n)).collect::<Result<Vec<_>, _>>()?;
    for path in &args.factor_files {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        factors.push(Sequence::parse_lines(&text)?);
    }
    Ok((factors, n))
}

fn matrix_plain(m: &TriMatrix) -> String {
    let mut s = String::new();
    for row in m.to_string_rows() {
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn matrix_csv(m: &TriMatrix) -> String {
    let mut s = String::from("i,j,value\n");
    for (i, row) in m.to_string_rows().iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let _ = writeln!(s, "{},{},{v}", i + 1, j + 1);
        }
    }
    s
}

fn json_line(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn sum(format: Format, args: &FactorArgs, m: i64, with_table: bool, guard: Option<u128>) -> Outcome {
    let (factors, n) = build_factors(args)?;
    let m = positive("m", m)?;
    let mode = mode_of(args.mode);
    let spec = SumSpec::new(factors.clone(), n, m, mode)?;
    let value = nested_sum::evaluate_matrix(&spec);
    let brute = match guard {
        Some(g) => Some(nested_sum::evaluate_bruteforce_guarded(&spec, g)?),
        None => None,
    };
    let passed = brute.as_ref().is_none_or(|b| b == &value);
    let table = if with_table { Some(nested_sum::evaluate_table(&factors, mode, n)?) } else { None };
    let text = match format {
        Format::Plain => {
            let mut s = format!("{}\n", format_scalar(&value));
            if let Some(b) = &brute {
                let _ = writeln!(s, "bruteforce {}", format_scalar(b));
            }
            if let Some(t) = &table {
                s.push_str(&matrix_plain(t.matrix()));
            }
            s
        }
        Format::Csv => {
            let mut s = format!("N,m,mode,value\n{n},{m},{mode},{}\n", format_scalar(&value));
            if let Some(t) = &table {
                s.push_str(&matrix_csv(t.matrix()));
            }
            s
        }
        Format::Json => {
            let mut obj = json!({
                "mode": mode, "N": n, "m": m, "k": factors.len(), "value": format_scalar(&value),
            });
            if let Some(b) = &brute {
                obj["bruteforce"] = json!(format_scalar(b));
            }
            if let Some(t) = &table {
                obj["table"] = t.matrix().to_json();
            }
            json_line(&obj)
        }
    };
    Ok(Emission { text, passed })
}

fn table(format: Format, args: &FactorArgs) -> Outcome {
    let (factors, n) = build_factors(args)?;
    let t = nested_sum::evaluate_table(&factors, mode_of(args.mode), n)?;
    ok(match format {
        Format::Json => json_line(t.matrix()),
        Format::Csv => matrix_csv(t.matrix()),
        Format::Plain => matrix_plain(t.matrix()),
    })
}

/// Draws or reads the inputs for one identity and returns its reports.
struct Verifier<'a> {
    args: &'a VerifyArgs,
    rng: ChaCha8Rng,
    explicit: Vec<Sequence>,
}

impl Verifier<'_> {
    fn count(&self) -> usize {
        self.args.random.unwrap_or(1)
    }

    fn dim(&mut self, min: usize) -> usize {
        match self.args.len {
            Some(n) => n,
            None => self.rng.gen_range(min..=self.args.max_n.max(min)),
        }
    }

    fn seqs(&mut self, how_many: usize, n: usize, distinct: bool) -> Result<Vec<Sequence>, Failure> {
        if !self.explicit.is_empty() {
            if self.explicit.len() < how_many {
                return Err(usage(format!("expected {how_many} --seq values, got {}", self.explicit.len())));
            }
            return Ok(self.explicit[..how_many].to_vec());
        }
        Ok((0..how_many)
            .map(|_| {
                if distinct {
                    random_distinct_sequence(&mut self.rng, n)
                } else {
                    random_sequence(&mut self.rng, n)
                }
            })
            .collect())
    }

    fn instances(&mut self, identity: Identity) -> Result<Vec<IdentityReport>, Failure> {
        let rounds = if self.explicit.is_empty() { self.count() } else { 1 };
        let mut out = Vec::new();
        for _ in 0..rounds {
            out.extend(self.one(identity)?);
        }
        Ok(out)
    }

    fn bounds(&mut self, fixed: Option<usize>) -> Result<(usize, usize), Failure> {
        let n = match (self.args.upper, fixed) {
            (Some(n), _) => positive("N", n)?,
            (None, Some(len)) => len,
            (None, None) => self.dim(2),
        };
        if n < 2 {
            return Err(usage("N must be at least 2"));
        }
        let m = match self.args.m {
            Some(m) => m,
            None => self.rng.gen_range(1..n),
        };
        Ok((n, m))
    }

    fn one(&mut self, identity: Identity) -> Result<Vec<IdentityReport>, Failure> {
        let reports = match identity {
            Identity::TwoFactor => {
                let n = self.dim(1);
                let s = self.seqs(2, n, false)?;
                vec![identities::verify_two_factor(&s[0], &s[1])?]
            }
            Identity::ThreeFactor => {
                let n = self.dim(1);
                let s = self.seqs(3, n, false)?;
                vec![identities::verify_three_factor(&s[0], &s[1], &s[2])?]
            }
            Identity::PartialFraction => {
                let n = self.dim(1);
                let a = self.seqs(1, n, true)?.remove(0);
                let mut v = Vec::new();
                for i in 1..=a.len() {
                    for j in 1..=i {
                        v.push(identities::verify_partial_fraction(&a, i, j)?);
                    }
                }
                v
            }
            Identity::SaTwo => {
                let fixed = self.explicit.first().map(Sequence::len);
                let (n, m) = self.bounds(fixed)?;
                let s = self.seqs(2, n, false)?;
                vec![identities::verify_sa_two(&s[0], &s[1], n, m)?]
            }
            Identity::SaThree => {
                let fixed = self.explicit.first().map(Sequence::len);
                let (n, m) = self.bounds(fixed)?;
                let s = self.seqs(3, n, false)?;
                vec![identities::verify_sa_three(&s[0], &s[1], &s[2], n, m)?]
            }
            Identity::ButlerKarasik => {
                let n = self.dim(1);
                let a = self.seqs(1, n, false)?.remove(0);
                let k = self.args.k.unwrap_or_else(|| self.rng.gen_range(1..=4));
                vec![identities::verify_butler_karasik(&a, a.len(), k as usize)?]
            }
            Identity::SymmetricExpansion => {
                let n = self.dim(1);
                let a = self.seqs(1, n, true)?.remove(0);
                let k = self.args.k.unwrap_or_else(|| self.rng.gen_range(0..=5));
                vec![identities::verify_symmetric_expansion(&a, k)?]
            }
            Identity::Eigen => {
                let n = self.dim(1);
                let a = self.seqs(1, n, true)?.remove(0);
                identities::verify_eigen(&a)?
            }
            Identity::Dilcher => {
                let (n, k) = self.n_k(15)?;
                vec![identities::verify_dilcher(n, k)?]
            }
            Identity::GeneralDilcher => {
                let a = self.args.a.unwrap_or_else(|| self.rng.gen_range(1..=3));
                let (n, k) = self.n_k(10)?;
                vec![identities::verify_general_dilcher(a, n, k)?]
            }
            Identity::Walk => {
                let a = self.args.a.unwrap_or_else(|| self.rng.gen_range(1..=3));
                let (n, k) = self.n_k(12)?;
                vec![walk_report(n, a, k)?]
            }
            Identity::All => {
                let mut v = Vec::new();
                for id in Identity::value_variants().iter().filter(|&&i| i != Identity::All) {
                    v.extend(self.one(*id)?);
                }
                v
            }
        };
        Ok(reports)
    }

    fn n_k(&mut self, max_n: usize) -> Result<(usize, u32), Failure> {
        let n = match self.args.upper {
            Some(n) => positive("N", n)?,
            None => self.rng.gen_range(1..=max_n),
        };
        let k = self.args.k.unwrap_or_else(|| self.rng.gen_range(0..=4));
        Ok((n, k))
    }
}

fn walk_report(n: usize, a: u32, k: u32) -> Result<IdentityReport, Failure> {
    let lhs = walk::scaled_absorption(n, a, k)?;
    let factors = vec![Sequence::inverse_power(a, n)?; k as usize];
    let rhs = nested_sum::evaluate_matrix(&SumSpec::weak(factors, n, 1)?);
    let mut params = std::collections::BTreeMap::new();
    params.insert("N".to_string(), json!(n));
    params.insert("a".to_string(), json!(a));
    params.insert("k".to_string(), json!(k));
    Ok(IdentityReport::scalar("walk", params, lhs, rhs))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verify(format: Format, seed: u64, args: &VerifyArgs) -> Outcome {
    if args.max_n == 0 {
        return Err(usage("--max-n must be at least 1"));
    }
    if args.len == Some(0) {
        return Err(usage("--n must be at least 1"));
    }
    let explicit = args.seqs.iter().map(|s| parse_seq_arg(s)).collect::<Result<Vec<_>, _>>()?;
    let mut v = Verifier { args, rng: ChaCha8Rng::seed_from_u64(seed), explicit };
    let reports = v.instances(args.identity)?;
    let passed = reports.iter().all(|r| r.equal);
    let text = match format {
        Format::Json => reports.iter().map(json_line).collect(),
        Format::Plain => {
            let mut s = String::new();
            for r in &reports {
                let params = serde_json::to_string(&r.params).expect("serializable");
                let _ = writeln!(s, "{} {} {params}", if r.equal { "PASS" } else { "FAIL" }, r.identity);
            }
            let _ = writeln!(s, "{}/{} equal", reports.iter().filter(|r| r.equal).count(), reports.len());
            s
        }
        Format::Csv => {
            let mut s = String::from("identity,equal,params,lhs,rhs\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.identity,
                    r.equal,
                    csv_field(&plain_json(&r.params)),
                    csv_field(&plain_json(&r.lhs)),
                    csv_field(&plain_json(&r.rhs))
                );
            }
            s
        }
    };
    Ok(Emission { text, passed })
}

/// JSON text of a value, unquoted when it is a bare string.
fn plain_json(v: &impl serde::Serialize) -> String {
    match serde_json::to_value(v).expect("serializable") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn walk_cmd(format: Format, seed: u64, n: i64, a: u32, k: u32, samples: u64) -> Outcome {
    let n = positive("N", n)?;
    if a == 0 {
        return Err(usage("a must be at least 1"));
    }
    if samples == 0 {
        return Err(usage("samples must be at least 1"));
    }
    let exact = walk::absorption_probability_exact(n, a, k)?;
    let mc = walk::absorption_probability_montecarlo(n, a, k, samples, seed)?;
    let report = walk::WalkReport::new(&exact, &mc);
    ok(match format {
        Format::Json => json_line(&report),
        Format::Csv => format!(
            "exact,estimate,stderr,samples,seed\n{},{},{},{},{}\n",
            report.exact, report.estimate, report.stderr, report.samples, report.seed
        ),
        Format::Plain => format!(
            "exact {}\nestimate {}\nstderr {}\nsamples {}\nseed {}\n",
            report.exact, report.estimate, report.stderr, report.samples, report.seed
        ),
    })
}

fn converge(format: Format, exponents: &[u32], n: i64, start: usize) -> Outcome {
    let n = positive("N", n)?;
    let points = nested_sum::converge_stream(exponents, n, &geometric_checkpoints(start, n))?;
    ok(match format {
        Format::Csv => converge_csv(&points),
        Format::Plain => points.iter().map(|(n, v)| format!("{n} {}\n", format_significant(*v, 15))).collect(),
        Format::Json => {
            let rows: Vec<Value> = points.iter().map(|(n, v)| json!({"N": n, "value": v})).collect();
            json_line(&rows)
        }
    })
}

fn eigen(format: Format, a: &[String], power: Option<u32>) -> Outcome {
    let a = parse_list(a)?;
    let ed = algebra::eigendecompose(&a)?;
    let powered = power.map(|k| (k, ed.power(k)));
    ok(match format {
        Format::Json => {
            let mut obj = json!({ "lambda": a, "D": ed.d, "E": ed.e });
            if let Some((k, m)) = &powered {
                obj["power"] = json!({ "k": k, "matrix": m });
            }
            json_line(&obj)
        }
        Format::Plain | Format::Csv => {
            let mut s = format!("lambda {}\nD\n{}E\n{}", a, matrix_plain(&ed.d), matrix_plain(&ed.e));
            if let Some((k, m)) = &powered {
                let _ = write!(s, "S_a^{k}\n{}", matrix_plain(m));
            }
            s
        }
    })
}

fn inverse(format: Format, a: &[String]) -> Outcome {
    let a = parse_list(a)?;
    let inv = algebra::inverse_s(&a)?;
    ok(match format {
        Format::Json => json_line(&inv),
        Format::Csv => matrix_csv(&inv),
        Format::Plain => matrix_plain(&inv),
    })
}
