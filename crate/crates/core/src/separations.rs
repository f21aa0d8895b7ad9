//! Counting arguments at desk scale: sparse sets outnumber what short
//! advice can realize, a diagonal set escaping a finite family of advised
//! classifiers, and majority-vote amplification.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// `2^n * 2^advice_len` above this is refused.
pub const MAX_TABLE_LOG2: usize = 24;

/// Acceptance threshold defining the set realized by an advice string.
pub const THRESHOLD: f64 = 2.0 / 3.0;

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ratio_text<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub n: usize,
    pub f: usize,
    /// Number of subsets of `{0,1}^n` with at most `2f` elements.
    #[serde(serialize_with = "decimal")]
    pub lhs: BigUint,
    /// Number of advice strings of length `f n`, `2^{fn}`.
    #[serde(serialize_with = "decimal")]
    pub rhs: BigUint,
    pub holds: bool,
    /// `(2^n / 2f)^{2f}`.
    #[serde(serialize_with = "ratio_text")]
    pub intermediate: BigRational,
    /// `n > 2 (1 + log2 f)`, under which `intermediate > rhs`.
    pub side_condition: bool,
}

fn binomial(n: &BigUint, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Sum of `C(2^n, j)` over `j <= 2f`, compared with `2^{fn}`.
pub fn counting_inequality(n: usize, f: usize) -> Result<CountingReport> {
    if f == 0 {
        return Err(Error::InvalidArgument("f must be at least 1".into()));
    }
    let universe = BigUint::one() << n;
    if BigUint::from(2 * f) > universe {
        return Err(Error::InvalidArgument(format!(
            "2f = {} exceeds 2^n = {universe}",
            2 * f
        )));
    }
    let lhs = (0..=2 * f).map(|j| binomial(&universe, j)).sum::<BigUint>();
    let rhs = BigUint::one() << (f * n);
    let base = BigRational::new(BigInt::from(universe), BigInt::from(2 * f));
    let intermediate = num_traits::pow(base, 2 * f);
    Ok(CountingReport {
        n,
        f,
        holds: lhs > rhs,
        lhs,
        rhs,
        intermediate,
        side_condition: n as f64 > 2.0 * (1.0 + (f as f64).log2()),
    })
}

/// A finite machine with advice: acceptance probability for every input
/// `x` and advice string `s`, both given by their indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassifierRecord", into = "ClassifierRecord")]
pub struct AdvisedClassifier {
    id: u64,
    n: usize,
    advice_len: usize,
    table: Vec<f64>,
}

/// JSON form: `table[x][s]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassifierRecord {
    id: u64,
    n: usize,
    advice_len: usize,
    table: Vec<Vec<f64>>,
}

impl TryFrom<ClassifierRecord> for AdvisedClassifier {
    type Error = Error;

    fn try_from(r: ClassifierRecord) -> Result<Self> {
        AdvisedClassifier::new(r.id, r.n, r.advice_len, r.table)
    }
}

impl From<AdvisedClassifier> for ClassifierRecord {
    fn from(c: AdvisedClassifier) -> Self {
        let width = 1usize << c.advice_len;
        ClassifierRecord {
            id: c.id,
            n: c.n,
            advice_len: c.advice_len,
            table: c.table.chunks(width).map(|row| row.to_vec()).collect(),
        }
    }
}

fn check_scale(n: usize, advice_len: usize) -> Result<()> {
    if n + advice_len > MAX_TABLE_LOG2 {
        return Err(Error::ScaleExceeded(format!(
            "table of 2^{n} x 2^{advice_len} entries exceeds 2^{MAX_TABLE_LOG2}"
        )));
    }
    Ok(())
}

impl AdvisedClassifier {
    pub fn new(id: u64, n: usize, advice_len: usize, table: Vec<Vec<f64>>) -> Result<Self> {
        check_scale(n, advice_len)?;
        if table.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                actual: table.len(),
            });
        }
        let mut flat = Vec::with_capacity(1 << (n + advice_len));
        for row in table {
            if row.len() != 1 << advice_len {
                return Err(Error::LengthMismatch {
                    expected: 1 << advice_len,
                    actual: row.len(),
                });
            }
            flat.extend(row);
        }
        if let Some(bad) = flat.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "acceptance probability {bad} outside [0, 1]"
            )));
        }
        Ok(AdvisedClassifier {
            id,
            n,
            advice_len,
            table: flat,
        })
    }

    pub fn from_fn(
        id: u64,
        n: usize,
        advice_len: usize,
        accept: impl Fn(u64, u64) -> f64,
    ) -> Result<Self> {
        check_scale(n, advice_len)?;
        let table = (0..1u64 << n)
            .map(|x| (0..1u64 << advice_len).map(|s| accept(x, s)).collect())
            .collect();
        AdvisedClassifier::new(id, n, advice_len, table)
    }

    /// Accepts `x` with certainty exactly when advice bit `x` is set, so
    /// every subset is realized.
    pub fn echo(id: u64, n: usize) -> Result<Self> {
        let advice_len = 1usize << n;
        AdvisedClassifier::from_fn(id, n, advice_len, |x, s| {
            ((s >> (advice_len as u64 - 1 - x)) & 1) as f64
        })
    }

    /// Entries uniform in `[0, 1]`.
    pub fn random(id: u64, n: usize, advice_len: usize, rng: &mut impl Rng) -> Result<Self> {
        check_scale(n, advice_len)?;
        let table = (0..1u64 << n)
            .map(|_| {
                (0..1u64 << advice_len)
                    .map(|_| rng.random::<f64>())
                    .collect()
            })
            .collect();
        AdvisedClassifier::new(id, n, advice_len, table)
    }

    /// `count` random classifiers with ids `0..count`, reproducible from `seed`.
    pub fn random_family(
        count: usize,
        n: usize,
        advice_len: usize,
        seed: u64,
    ) -> Result<Vec<Self>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| AdvisedClassifier::random(i as u64, n, advice_len, &mut rng))
            .collect()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn advice_len(&self) -> usize {
        self.advice_len
    }

    pub fn acceptance(&self, x: u64, s: u64) -> f64 {
        self.table[((x as usize) << self.advice_len) | s as usize]
    }
}

/// Subsets are sorted vectors of input indices.
pub type Subset = Vec<u64>;

#[derive(Debug, Clone, Serialize)]
pub struct RealizedSetFamily {
    pub classifier_id: u64,
    pub n: usize,
    pub sets: BTreeSet<Subset>,
}

/// For every advice string `s`, the set `{x : accept(x, s) >= 2/3}`.
pub fn realized_sets(c: &AdvisedClassifier) -> Result<RealizedSetFamily> {
    check_scale(c.n, c.advice_len)?;
    let sets: Vec<Subset> = (0..1u64 << c.advice_len)
        .into_par_iter()
        .map(|s| {
            (0..1u64 << c.n)
                .filter(|&x| c.acceptance(x, s) >= THRESHOLD)
                .collect()
        })
        .collect();
    Ok(RealizedSetFamily {
        classifier_id: c.id,
        n: c.n,
        sets: sets.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "set", rename_all = "snake_case")]
pub enum DiagonalOutcome {
    Found(Subset),
    NotFound,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagonalization {
    pub n: usize,
    pub f: usize,
    pub outcome: DiagonalOutcome,
    /// Candidates tried, in order of size and then lexicographically.
    pub candidates_examined: u64,
    /// Subsets of size at most `2f`.
    #[serde(serialize_with = "decimal")]
    pub candidates_total: BigUint,
    /// Distinct sets realized by the whole family.
    pub realized_total: usize,
    /// Candidates outnumber realized sets, so some candidate must escape.
    pub premise_holds: bool,
}

/// Next `k`-combination of `0..universe` in lexicographic order.
fn next_combination(c: &mut [u64], universe: u64) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < universe - (k - i) as u64 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// First subset of `{0,1}^n` with at most `2f` elements (by size, then
/// lexicographically) that no classifier realizes with any advice.
pub fn diagonal_sparse_set(
    classifiers: &[AdvisedClassifier],
    n: usize,
    f: usize,
) -> Result<Diagonalization> {
    if n > MAX_TABLE_LOG2 {
        return Err(Error::ScaleExceeded(format!("n = {n}")));
    }
    if f == 0 || (2 * f) as u64 > 1u64 << n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= 2f <= 2^n, got f = {f}, n = {n}"
        )));
    }
    let mut realized: BTreeSet<Subset> = BTreeSet::new();
    for c in classifiers {
        if c.n != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: c.n,
            });
        }
        realized.extend(realized_sets(c)?.sets);
    }
    let universe = 1u64 << n;
    let candidates_total = (0..=2 * f)
        .map(|j| binomial(&BigUint::from(universe), j))
        .sum::<BigUint>();
    let premise_holds = candidates_total > BigUint::from(realized.len());
    let mut examined = 0u64;
    let mut outcome = DiagonalOutcome::NotFound;
    'sizes: for size in 0..=2 * f {
        let mut comb: Vec<u64> = (0..size as u64).collect();
        loop {
            examined += 1;
            if !realized.contains(&comb) {
                outcome = DiagonalOutcome::Found(comb);
                break 'sizes;
            }
            if !next_combination(&mut comb, universe) {
                break;
            }
        }
    }
    Ok(Diagonalization {
        n,
        f,
        outcome,
        candidates_examined: examined,
        candidates_total,
        realized_total: realized.len(),
        premise_holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeWitness {
    pub classifier_id: u64,
    pub advice: u64,
    /// Input on which the pair is wrong with probability above 1/3.
    pub input: u64,
    pub correct_probability: f64,
}

/// Rechecks from the tables alone that no (classifier, advice) pair
/// decides `set` with bounded error. Returns one witness per pair, or
/// `None` if some pair does decide it.
pub fn verify_escape(classifiers: &[AdvisedClassifier], set: &[u64]) -> Option<Vec<EscapeWitness>> {
    let members: BTreeSet<u64> = set.iter().copied().collect();
    let mut transcript = Vec::new();
    for c in classifiers {
        for s in 0..1u64 << c.advice_len {
            let witness = (0..1u64 << c.n).find_map(|x| {
                let p = c.acceptance(x, s);
                let correct = if members.contains(&x) { p } else { 1.0 - p };
                (correct < THRESHOLD).then_some((x, correct))
            })?;
            transcript.push(EscapeWitness {
                classifier_id: c.id,
                advice: s,
                input: witness.0,
                correct_probability: witness.1,
            });
        }
    }
    Some(transcript)
}

/// Renders a subset as bit strings.
pub fn subset_strings(set: &[u64], n: usize) -> Vec<String> {
    set.iter()
        .map(|&x| BitString::from_index(x, n).to_string())
        .collect()
}

fn check_odd(t: u64) -> Result<()> {
    if t % 2 == 0 {
        return Err(Error::EvenRepetitions(t as usize));
    }
    Ok(())
}

/// Probability that a majority of `t` independent runs, each correct with
/// probability `p`, is correct. Exact.
pub fn majority_amplify(p: &BigRational, t: u64) -> Result<BigRational> {
    check_odd(t)?;
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let c = &b - &a;
    // sum_{j > t/2} C(t, j) a^j c^{t-j}, over b^t
    let mut numer = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=t {
        if j > t / 2 {
            numer += &binom * a.pow(j as u32) * c.pow((t - j) as u32);
        }
        binom = binom * BigInt::from(t - j) / BigInt::from(j + 1);
    }
    Ok(BigRational::new(numer, b.pow(t as u32)))
}

/// Floating-point version of [`majority_amplify`] for irrational `p`.
pub fn majority_amplify_f64(p: f64, t: u64) -> Result<f64> {
    check_odd(t)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(p);
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut ln_binom = 0.0;
    let mut sum = 0.0;
    for j in 0..=t {
        if j > t / 2 {
            sum += (ln_binom + j as f64 * lp + (t - j) as f64 * lq).exp();
        }
        ln_binom += ((t - j) as f64).ln() - ((j + 1) as f64).ln();
    }
    Ok(sum.min(1.0))
}

/// `1 - exp(-2 t (p - 1/2)^2)`, a lower bound on the majority success for `p > 1/2`.
pub fn hoeffding_floor(p: f64, t: u64) -> f64 {
    1.0 - (-2.0 * t as f64 * (p - 0.5).powi(2)).exp()
}

/// Largest repetition count scanned by [`advice_copies_for`].
pub const MAX_COPIES: u64 = 100_001;

/// Fewest (odd) advice copies whose majority vote errs with probability at most `epsilon`.
pub fn advice_copies_for(epsilon: &BigRational, base_p: &BigRational) -> Result<u64> {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    if !epsilon.is_positive() || *epsilon >= third {
        return Err(Error::InvalidArgument(format!(
            "target error {epsilon} outside (0, 1/3)"
        )));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if *base_p <= half || *base_p > BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "base success {base_p} must lie in (1/2, 1]"
        )));
    }
    let goal = BigRational::one() - epsilon;
    let mut t = 1;
    while t <= MAX_COPIES {
        if majority_amplify(base_p, t)? >= goal {
            return Ok(t);
        }
        t += 2;
    }
    Err(Error::ScaleExceeded(format!(
        "more than {MAX_COPIES} copies needed"
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct MajoritySimulation {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Standard error of the estimate under the exact value `reference`.
    pub sigma: f64,
    pub reference: f64,
    pub within_three_sigma: bool,
}

/// Monte-Carlo estimate of the majority success, compared with `reference`.
pub fn simulate_majority(
    p: f64,
    t: u64,
    trials: u64,
    reference: f64,
    seed: u64,
) -> Result<MajoritySimulation> {
    check_odd(t)?;
    let dist = Binomial::new(t, p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..trials)
        .filter(|_| dist.sample(&mut rng) > t / 2)
        .count() as u64;
    let estimate = successes as f64 / trials as f64;
    let sigma = (reference * (1.0 - reference) / trials as f64).sqrt();
    Ok(MajoritySimulation {
        trials,
        successes,
        estimate,
        sigma,
        reference,
        within_three_sigma: (estimate - reference).abs() <= 3.0 * sigma,
    })
}

/// Parses `a/b`, an integer, a decimal such as `0.05`, or `2^-k`.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("cannot read {text:?} as a rational"));
    let text = text.trim();
    if let Some(exp) = text.strip_prefix("2^") {
        let e: i32 = exp.parse().map_err(|_| bad())?;
        let two = BigRational::from_integer(BigInt::from(2));
        return Ok(num_traits::pow::Pow::pow(&two, e));
    }
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = format!("{int}{frac}");
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(numer, denom));
    }
    let a: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(a))
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
