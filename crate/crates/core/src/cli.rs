//! Batch front end: one experiment per invocation, one report per run.
//!
//! Reports are JSON (canonical) or CSV (a projection of the tabular part).
//! Every report carries the seed, the inputs, the tolerance table in force
//! and a list of named checks; the process exits 0 only if all checks pass.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::amplitude::{decode_bit, decode_via_gateset, TallyTheta};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::fingerprint::{build_advice, membership_test};
use crate::qrac::{
    binary_entropy, nayak_min_qubits, rac21_scheme, rac31_scheme, rac_search, scheme_success,
};
use crate::quantum::{CMatrix, Qustring};
use crate::separations::{
    advice_copies_for, counting_inequality, diagonal_sparse_set, hoeffding_floor, majority_amplify,
    parse_ratio, ratio_f64, realized_sets, simulate_majority, subset_strings, verify_escape,
    AdvisedClassifier, DiagonalOutcome,
};
use crate::synthesis::{synthesize_state, synthesize_unitary, SynthesisReport};
use crate::tolerances::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qadvice", version, about = "Quantum advice experiments")]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    json_pretty: bool,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Adds a wall-clock timestamp to the report.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Fingerprint advice for a random sparse set.
    Fingerprint(FingerprintArgs),
    /// Random access codes and the entropy bound.
    Qrac(QracArgs),
    /// Tally-set decoding from one rotation angle.
    #[command(subcommand)]
    Amplitude(AmplitudeCommand),
    /// Gate-set synthesis of a state or a unitary.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Diagonal sparse set against a family of advised classifiers.
    Diag(DiagArgs),
    /// Majority-vote amplification.
    Amplify(AmplifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FingerprintArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub f: usize,
    /// Number of random members, at most `2f`.
    #[arg(long, default_value_t = 4)]
    pub members: usize,
    /// Sampled runs on members and on non-members.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QracArgs {
    /// Only evaluate the entropy bound for `--n` and `--p`.
    #[arg(long)]
    pub bound: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Search widths `1..=max-n`.
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    /// Angle grid step in degrees.
    #[arg(long, default_value_t = 1.0)]
    pub resolution_deg: f64,
    #[arg(long, default_value_t = crate::qrac::DEFAULT_STARTS)]
    pub starts: usize,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeCommand {
    /// Decode one bit of a digit pattern.
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecodeArgs {
    /// Digit pattern such as `+-+-`.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: String,
    #[arg(long)]
    pub k: usize,
    /// Replace the rotation by a gate-set circuit.
    #[arg(long)]
    pub gateset: bool,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthCommand {
    State(SynthArgs),
    Unitary(SynthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// Target file: whitespace-separated `re,im` entries, one matrix row per line.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Random target on this many qubits instead of a file.
    #[arg(long, conflicts_with = "target")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Also write the circuit in text form here.
    #[arg(long)]
    pub circuit_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub f: usize,
    /// JSON array of classifier tables.
    #[arg(long)]
    pub machines: Option<PathBuf>,
    /// Number of random classifiers when no file is given.
    #[arg(long, default_value_t = 8)]
    pub random: usize,
    #[arg(long, default_value_t = 3)]
    pub advice_len: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AmplifyArgs {
    /// Single-run success, e.g. `2/3` or `0.9`.
    #[arg(long, default_value = "2/3")]
    pub p: String,
    /// Odd repetition count.
    #[arg(long)]
    pub t: Option<u64>,
    /// Target error for the copy count, e.g. `2^-10`.
    #[arg(long)]
    pub eps: Option<String>,
    /// Monte-Carlo trials for the copy count cross-check.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub json_pretty: bool,
    pub tolerances: Tolerances,
    pub timestamp: bool,
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        ExperimentConfig {
            command,
            seed,
            output: None,
            format: Format::Json,
            json_pretty: false,
            tolerances: Tolerances::DEFAULT,
            timestamp: false,
        }
    }

    /// Parses command-line arguments (the first item is the program name).
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, ConfigError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(ConfigError::Clap)?;
        let mut tolerances = Tolerances::DEFAULT;
        for item in &cli.tol {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                ConfigError::Invalid(format!("--tol expects KEY=VALUE, got {item:?}"))
            })?;
            let value: f64 = value
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("bad tolerance value {value:?}")))?;
            tolerances = tolerances
                .with_override(key.trim(), value)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(ExperimentConfig {
            command: cli.command,
            seed: cli.seed,
            output: cli.output,
            format: cli.format,
            json_pretty: cli.json_pretty,
            tolerances,
            timestamp: cli.timestamp,
        })
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Clap(clap::Error),
    Invalid(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn to_json(&self, pretty: bool) -> Result<String> {
        let text = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        };
        text.map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// The table when there is one, otherwise the top-level results as
    /// `key,value` rows, followed by the checks.
    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(table) = &self.table {
            w.write_record(&table.header).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row).map_err(csv_err)?;
            }
        } else {
            w.write_record(["key", "value"]).map_err(csv_err)?;
            if let Value::Object(map) = &self.results {
                for (k, v) in map {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), v.as_str()]).map_err(csv_err)?;
                }
            }
            for c in &self.checks {
                w.write_record([format!("check:{}", c.name), c.passed.to_string()])
                    .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Runs the configured experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let (name, results, checks, table) = match &config.command {
        Command::Fingerprint(a) => run_fingerprint(a, config)?,
        Command::Qrac(a) => run_qrac(a, config)?,
        Command::Amplitude(AmplitudeCommand::Decode(a)) => run_decode(a)?,
        Command::Synth(cmd) => run_synth(cmd, config)?,
        Command::Diag(a) => run_diag(a, config)?,
        Command::Amplify(a) => run_amplify(a, config)?,
    };
    let timestamp = config.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let inputs = match to_value(&config.command) {
        Value::Object(map) => map
            .into_iter()
            .next()
            .map(|(_, v)| v)
            .unwrap_or(Value::Null),
        other => other,
    };
    Ok(Report {
        command: name.to_string(),
        seed: config.seed,
        timestamp,
        inputs,
        results,
        passed: checks.iter().all(|c| c.passed),
        checks,
        tolerances: config.tolerances,
        table,
    })
}

type Outcome = (&'static str, Value, Vec<Check>, Option<Table>);

fn run_fingerprint(a: &FingerprintArgs, config: &ExperimentConfig) -> Result<Outcome> {
    if a.n == 0 || a.n > 63 {
        return Err(Error::ScaleExceeded(format!("n = {} outside 1..=63", a.n)));
    }
    let universe = 1u64 << a.n;
    if a.members as u64 > universe {
        return Err(Error::InvalidArgument("more members than strings".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut chosen = BTreeSet::new();
    while chosen.len() < a.members {
        chosen.insert(rng.random_range(0..universe));
    }
    let members: Vec<BitString> = chosen
        .iter()
        .map(|&x| BitString::from_index(x, a.n))
        .collect();
    let advice = build_advice(&members, a.n, a.f)?;
    let bound = advice.soundness_bound();
    let bound_f = ratio_f64(&bound);
    let mut table = Table {
        header: vec!["input".into(), "member".into(), "probability".into()],
        rows: Vec::new(),
    };

    let mut member_min: f64 = 1.0;
    for y in &members {
        let out = membership_test(y, &advice, &mut rng)?;
        member_min = member_min.min(out.probability_f64());
        table.rows.push(vec![
            y.to_string(),
            "true".into(),
            out.acceptance_probability.to_string(),
        ]);
    }

    // non-members: all of them when few, otherwise a sample
    let exhaustive = a.n <= 16;
    let nonmembers: Vec<u64> = if exhaustive {
        (0..universe).filter(|x| !chosen.contains(x)).collect()
    } else {
        let mut v = Vec::with_capacity(a.trials);
        while v.len() < a.trials {
            let x = rng.random_range(0..universe);
            if !chosen.contains(&x) {
                v.push(x);
            }
        }
        v
    };
    let mut worst = (0.0f64, String::new());
    for &x in &nonmembers {
        let xs = BitString::from_index(x, a.n);
        let out = membership_test(&xs, &advice, &mut rng)?;
        let p = out.probability_f64();
        if p > worst.0 {
            worst = (p, out.acceptance_probability.to_string());
        }
        table.rows.push(vec![
            xs.to_string(),
            "false".into(),
            out.acceptance_probability.to_string(),
        ]);
    }

    // sampled runs
    let mut member_accepts = 0;
    let mut nonmember_accepts = 0;
    let mut nonmember_mean = 0.0;
    for i in 0..a.trials {
        if !members.is_empty() {
            let y = &members[i % members.len()];
            member_accepts += membership_test(y, &advice, &mut rng)?.decision as usize;
        }
        let x = nonmembers[rng.random_range(0..nonmembers.len())];
        let out = membership_test(&BitString::from_index(x, a.n), &advice, &mut rng)?;
        nonmember_accepts += out.decision as usize;
        nonmember_mean += out.probability_f64();
    }
    let member_runs = if members.is_empty() { 0 } else { a.trials };
    let rate = nonmember_accepts as f64 / a.trials.max(1) as f64;
    let mean = nonmember_mean / a.trials.max(1) as f64;
    let sigma = (mean * (1.0 - mean) / a.trials.max(1) as f64).sqrt();

    let results = json!({
        "q": advice.field().order(),
        "m": advice.m(),
        "members": members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "advice_qubits": advice.advice_qubits(),
        "advice_length_bound": advice.length_bound(),
        "soundness_bound": bound.to_string(),
        "soundness_bound_f64": bound_f,
        "member_acceptance_min": member_min,
        "nonmembers_evaluated": nonmembers.len(),
        "nonmembers_exhaustive": exhaustive,
        "max_nonmember_probability": worst.0,
        "max_nonmember_probability_exact": worst.1,
        "sampled_member_accepts": member_accepts,
        "sampled_member_runs": member_runs,
        "sampled_nonmember_accepts": nonmember_accepts,
        "sampled_nonmember_runs": a.trials,
        "sampled_nonmember_expected_rate": mean,
    });
    let checks = vec![
        check(
            "members_accepted_with_certainty",
            member_min == 1.0,
            format!("min {member_min}"),
        ),
        check(
            "nonmembers_below_bound",
            worst.0 <= bound_f,
            format!("max {} <= {}", worst.0, bound_f),
        ),
        check("bound_below_quarter", bound_f < 0.25, format!("{bound_f}")),
        check(
            "sampled_members_accepted",
            member_accepts == member_runs,
            format!("{member_accepts}/{member_runs}"),
        ),
        check(
            "sampled_nonmember_rate_within_3_sigma",
            (rate - mean).abs() <= 3.0 * sigma + 1.0 / a.trials.max(1) as f64,
            format!("rate {rate}, expected {mean}, sigma {sigma}"),
        ),
    ];
    Ok(("fingerprint", results, checks, Some(table)))
}

fn run_qrac(a: &QracArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let tol = config.tolerances;
    if a.bound {
        let (n, p) = match (a.n, a.p) {
            (Some(n), Some(p)) => (n, p),
            _ => return Err(Error::InvalidArgument("--bound needs --n and --p".into())),
        };
        let h = binary_entropy(p)?;
        let m_min = nayak_min_qubits(n, p)?;
        let results =
            json!({ "n": n, "p": p, "entropy": h, "floor": (1.0 - h) * n as f64, "m_min": m_min });
        let checks = vec![check(
            "m_min_covers_floor",
            m_min as f64 >= (1.0 - h) * n as f64 - tol.ceiling_slack,
            "",
        )];
        return Ok(("qrac", results, checks, None));
    }
    let s2 = 0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 0.5 + 0.5 / 3f64.sqrt();
    let p21 = scheme_success(&rac21_scheme())?;
    let p31 = scheme_success(&rac31_scheme())?;
    let constant = 1.0 - binary_entropy(1.0 / 3.0)?;
    let mut checks = vec![
        check(
            "rac21_closed_form",
            (p21 - s2).abs() <= tol.basis_orthonormality,
            format!("{p21}"),
        ),
        check(
            "rac31_closed_form",
            (p31 - s3).abs() <= tol.basis_orthonormality,
            format!("{p31}"),
        ),
        check(
            "entropy_constant_above_0.08",
            constant > 0.08,
            format!("{constant}"),
        ),
    ];
    let mut table = Table {
        header: ["n", "m", "best_p", "bound_floor"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
    };
    let mut rows = Vec::new();
    let resolution = a.resolution_deg.to_radians();
    for n in 1..=a.max_n {
        let r = rac_search(n, 1, resolution, a.starts, config.seed)?;
        let floor = (1.0 - binary_entropy(r.best_p)?) * n as f64;
        checks.push(check(
            &format!("entropy_bound_n{n}"),
            1.0 >= floor - tol.basis_orthonormality,
            format!("m = 1 >= {floor}"),
        ));
        match n {
            1 => checks.push(check(
                "search_n1_perfect",
                r.best_p >= 1.0 - 1e-9,
                format!("{}", r.best_p),
            )),
            2 => checks.push(check(
                "search_n2_optimum",
                r.best_p >= 0.8535 && r.best_p <= p21 + 1e-3,
                format!("{}", r.best_p),
            )),
            3 => checks.push(check(
                "search_n3_optimum",
                (r.best_p - 0.78868).abs() <= 1e-3,
                format!("{}", r.best_p),
            )),
            _ => {}
        }
        table.rows.push(vec![
            n.to_string(),
            "1".into(),
            format!("{:.9}", r.best_p),
            format!("{floor:.9}"),
        ]);
        rows.push(json!({ "n": n, "m": 1, "best_p": r.best_p, "bound_floor": floor, "best_start": r.best_start }));
    }
    let results = json!({
        "rac21_success": p21,
        "rac31_success": p31,
        "one_minus_entropy_of_third": constant,
        "search": rows,
    });
    Ok(("qrac", results, checks, Some(table)))
}

fn run_decode(a: &DecodeArgs) -> Result<Outcome> {
    let theta: TallyTheta = a.digits.parse()?;
    let d = decode_bit(&theta, a.k)?;
    let member = theta.is_member(a.k)?;
    let mut checks = vec![
        check("decision_matches_digit", d.decision == member, ""),
        check(
            "margin",
            if member {
                d.acceptance_probability >= 0.987
            } else {
                d.acceptance_probability <= 0.013
            },
            format!("{}", d.acceptance_probability),
        ),
    ];
    let mut results = json!({
        "probability": d.acceptance_probability,
        "decision": d.decision,
        "exact_frac": d.exact_frac.to_string(),
        "theta_over_2pi": theta.turns().to_string(),
    });
    if a.gateset {
        let g = decode_via_gateset(&theta, a.k, a.eps)?;
        checks.push(check(
            "gateset_within_2eps",
            (g.probability - g.exact_probability).abs() <= 2.0 * a.eps,
            format!("{}", g.probability),
        ));
        checks.push(check(
            "gateset_decision_unchanged",
            g.decision == d.decision,
            "",
        ));
        results["gateset"] = to_value(&g);
    }
    Ok(("amplitude", results, checks, None))
}

fn parse_entry(token: &str) -> Result<Complex64> {
    let bad = || Error::InvalidArgument(format!("bad amplitude {token:?}"));
    let (re, im) = token.split_once(',').unwrap_or((token, "0"));
    Ok(Complex64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn read_rows(path: &PathBuf) -> Result<Vec<Vec<Complex64>>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(parse_entry).collect())
        .collect()
}

fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    g.qr().q()
}

fn run_synth(cmd: &SynthCommand, config: &ExperimentConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let report: SynthesisReport = match cmd {
        SynthCommand::State(a) => {
            let target = match (&a.target, a.random) {
                (Some(path), _) => {
                    let amps: Vec<Complex64> = read_rows(path)?.into_iter().flatten().collect();
                    Qustring::with_tolerance(amps, config.tolerances.normalization)?
                }
                (None, Some(k)) => {
                    use rand_distr::{Distribution, StandardNormal};
                    let amps = (0..1usize << k.min(20))
                        .map(|_| {
                            Complex64::new(
                                StandardNormal.sample(&mut rng),
                                StandardNormal.sample(&mut rng),
                            )
                        })
                        .collect();
                    Qustring::normalized(amps)?
                }
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "--target or --random required".into(),
                    ))
                }
            };
            synthesize_state(&target, a.eps)?
        }
        SynthCommand::Unitary(a) => {
            let u = match (&a.target, a.random) {
                (Some(path), _) => {
                    let rows = read_rows(path)?;
                    let dim = rows.len();
                    if rows.iter().any(|r| r.len() != dim) {
                        return Err(Error::NotSquare {
                            rows: dim,
                            cols: rows.first().map_or(0, Vec::len),
                        });
                    }
                    CMatrix::from_fn(dim, dim, |i, j| rows[i][j])
                }
                (None, Some(k)) => random_unitary(1 << k.min(10), &mut rng),
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "--target or --random required".into(),
                    ))
                }
            };
            synthesize_unitary(&u, a.eps)?
        }
    };
    let args = match cmd {
        SynthCommand::State(a) | SynthCommand::Unitary(a) => a,
    };
    if let Some(path) = &args.circuit_out {
        fs::write(path, report.circuit.to_string())?;
    }
    let checks = vec![check(
        "achieved_below_epsilon",
        report.achieved_error < report.epsilon,
        format!("{} < {}", report.achieved_error, report.epsilon),
    )];
    Ok(("synth", to_value(&report), checks, None))
}

fn run_diag(a: &DiagArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let classifiers: Vec<AdvisedClassifier> = match &a.machines {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidArgument(format!("classifier file: {e}")))?
        }
        None => AdvisedClassifier::random_family(a.random, a.n, a.advice_len, config.seed)?,
    };
    let counting = counting_inequality(a.n, a.f)?;
    let mut family_sizes = Vec::new();
    for c in &classifiers {
        family_sizes.push(json!({ "id": c.id(), "advice_len": c.advice_len(), "sets": realized_sets(c)?.sets.len() }));
    }
    let d = diagonal_sparse_set(&classifiers, a.n, a.f)?;
    let mut checks = vec![check(
        "found_unless_premise_fails",
        matches!(d.outcome, DiagonalOutcome::Found(_)) || !d.premise_holds,
        format!("premise holds: {}", d.premise_holds),
    )];
    let mut transcript = Value::Null;
    let mut escaping = Value::Null;
    if let DiagonalOutcome::Found(set) = &d.outcome {
        let verified = verify_escape(&classifiers, set);
        checks.push(check(
            "escape_verified",
            verified.is_some(),
            "every (classifier, advice) pair errs on some input",
        ));
        transcript = to_value(&verified);
        escaping = to_value(&subset_strings(set, a.n));
    }
    let results = json!({
        "counting": to_value(&counting),
        "families": family_sizes,
        "diagonalization": to_value(&d),
        "escaping_set": escaping,
        "verification": transcript,
    });
    Ok(("diag", results, checks, None))
}

fn run_amplify(a: &AmplifyArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let p = parse_ratio(&a.p)?;
    let pf = ratio_f64(&p);
    let mut results = json!({ "p": p.to_string() });
    let mut checks = Vec::new();
    if let Some(t) = a.t {
        let v = majority_amplify(&p, t)?;
        let vf = v.to_f64().unwrap_or(f64::NAN);
        results["t"] = json!(t);
        results["value"] = json!(v.to_string());
        results["value_f64"] = json!(vf);
        if pf > 0.5 {
            let floor = hoeffding_floor(pf, t);
            results["hoeffding_floor"] = json!(floor);
            checks.push(check(
                "above_hoeffding_floor",
                vf >= floor,
                format!("{vf} >= {floor}"),
            ));
        }
    }
    if let Some(eps) = &a.eps {
        let eps = parse_ratio(eps)?;
        let t = advice_copies_for(&eps, &p)?;
        let tail = majority_amplify(&p, t)?;
        let reference = ratio_f64(&tail);
        let sim = simulate_majority(pf, t, a.trials, reference, config.seed)?;
        checks.push(check(
            "simulation_within_3_sigma",
            sim.within_three_sigma,
            format!("{} vs {}", sim.estimate, reference),
        ));
        results["epsilon"] = json!(eps.to_string());
        results["copies"] = json!(t);
        results["copies_tail"] = json!(tail.to_string());
        results["copies_tail_f64"] = json!(reference);
        results["simulation"] = to_value(&sim);
    }
    if a.t.is_none() && a.eps.is_none() {
        return Err(Error::InvalidArgument("amplify needs --t or --eps".into()));
    }
    Ok(("amplify", results, checks, None))
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::SynthesisFailed { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Parses, runs and writes the report; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match ExperimentConfig::from_args(args) {
        Ok(c) => c,
        Err(ConfigError::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(ConfigError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let text = match config.format {
        Format::Json => report.to_json(config.json_pretty).map(|mut s| {
            s.push('\n');
            s
        }),
        Format::Csv => report.to_csv(),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return EXIT_IO;
            }
        }
        None => print!("{text}"),
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> ExperimentConfig {
        let mut full = vec!["qadvice"];
        full.extend_from_slice(args);
        ExperimentConfig::from_args(full).unwrap()
    }

    #[test]
    fn amplify_report() {
        let r = run(&config(&["amplify", "--p", "2/3", "--t", "3"])).unwrap();
        assert_eq!(r.results["value"], "20/27");
        assert!(r.passed);
    }

    #[test]
    fn bound_report() {
        let r = run(&config(&["qrac", "--bound", "--n", "2", "--p", "0.853553"])).unwrap();
        assert_eq!(r.results["m_min"], 1);
    }

    #[test]
    fn decode_report() {
        let r = run(&config(&[
            "amplitude",
            "decode",
            "--digits",
            "+-+-",
            "--k",
            "2",
        ]))
        .unwrap();
        assert_eq!(r.results["decision"], false);
        assert!(r.passed);
    }

    #[test]
    fn tolerance_overrides_are_embedded() {
        let c = config(&["--tol", "unitarity=1e-6", "amplify", "--t", "1"]);
        assert_eq!(c.tolerances.unitarity, 1e-6);
        let r = run(&c).unwrap();
        let v: Value = serde_json::from_str(&r.to_json(false).unwrap()).unwrap();
        assert_eq!(v["tolerances"]["unitarity"], 1e-6);
        assert!(matches!(
            ExperimentConfig::from_args(["qadvice", "--tol", "bogus=1", "amplify"]),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(main_with_args(["qadvice", "frobnicate"]), EXIT_USAGE);
    }
}
