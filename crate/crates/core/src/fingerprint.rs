//! Quantum fingerprints and the sparse-set advice built from them.
//!
//! The fingerprint of `x` over GF(q) is `q^{-1/2} sum_z |z>|p_x(z)>`, two
//! registers of `ceil(log2 q)` qubits each. An advice object for a set
//! `{y_1, ..., y_m}` is the marker `|0^m 1>` followed by the fingerprints of
//! the members. The membership algorithm measures the first register of
//! every fingerprint, obtaining some `z`, and accepts as soon as `p_x(z)`
//! matches the second register.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::prime_field::{agreement_count, poly_eval_unchecked, PrimeField};
use crate::quantum::Qustring;

/// Dense fingerprint states are only materialized up to this many qubits.
pub const MAX_DENSE_QUBITS: usize = 24;

/// Constant `c` in the advice-length bound `c * f * log n + c`.
pub const ADVICE_LENGTH_CONSTANT: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    source: BitString,
    field: PrimeField,
}

impl Fingerprint {
    /// Fingerprint of `x` over an explicitly chosen field.
    pub fn over_field(x: &BitString, field: PrimeField) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument(
                "fingerprint of an empty string".into(),
            ));
        }
        if (field.order() as u128) < x.len() as u128 {
            return Err(Error::FieldTooSmall {
                q: field.order(),
                n: x.len(),
            });
        }
        Ok(Fingerprint {
            source: x.clone(),
            field,
        })
    }

    pub fn source(&self) -> &BitString {
        &self.source
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Width of each of the two registers.
    pub fn register_qubits(&self) -> usize {
        self.field.register_qubits()
    }

    /// Total length `2 ceil(log2 q)`.
    pub fn num_qubits(&self) -> usize {
        2 * self.register_qubits()
    }

    /// The `q` basis states `(z, p_x(z))` carrying amplitude `1/sqrt(q)`.
    pub fn support(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let q = self.field.order();
        (0..q).map(move |z| (z, poly_eval_unchecked(&self.source, z, q).value()))
    }

    pub fn basis_index(&self, z: u64, value: u64) -> usize {
        ((z << self.register_qubits()) | value) as usize
    }

    /// Dense amplitude vector, tagged as exactly uniform over `q` states.
    pub fn state(&self) -> Result<Qustring> {
        if self.num_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::ScaleExceeded(format!(
                "fingerprint has {} qubits; dense states stop at {MAX_DENSE_QUBITS}",
                self.num_qubits()
            )));
        }
        let support: Vec<usize> = self
            .support()
            .map(|(z, v)| self.basis_index(z, v))
            .collect();
        Qustring::uniform_over(self.num_qubits(), &support)
    }
}

/// `ceil(n / epsilon)` for rational `epsilon`.
fn ceil_div_by_ratio(n: u64, epsilon: Ratio<u64>) -> u64 {
    let num = n as u128 * *epsilon.denom() as u128;
    let den = *epsilon.numer() as u128;
    num.div_ceil(den) as u64
}

/// Fingerprint of `x` over GF(q) with `q` the least prime above `ceil(|x|/epsilon)`.
pub fn make_fingerprint(x: &BitString, epsilon: Ratio<u64>) -> Result<Fingerprint> {
    if epsilon.is_zero() || epsilon > Ratio::one() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument(
            "fingerprint of an empty string".into(),
        ));
    }
    let field = PrimeField::least_above(ceil_div_by_ratio(x.len() as u64, epsilon))?;
    Fingerprint::over_field(x, field)
}

/// The advice `|0^m 1> |phi(y_1)> ... |phi(y_m)>` for a sparse set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintAdvice {
    n: usize,
    f: usize,
    field: PrimeField,
    fingerprints: Vec<Fingerprint>,
}

/// Field used for length-`n` inputs with budget `f`: GF(least prime above `4 * 2fn`).
pub fn advice_field(n: usize, f: usize) -> Result<PrimeField> {
    let k = 2 * f as u64 * n as u64;
    PrimeField::least_above(4 * k)
}

/// Builds the advice for `members`, each of length `n`, under budget `f`.
pub fn build_advice(members: &[BitString], n: usize, f: usize) -> Result<FingerprintAdvice> {
    if n == 0 || f == 0 {
        return Err(Error::InvalidArgument("n and f must be positive".into()));
    }
    FingerprintAdvice::with_field(members, n, f, advice_field(n, f)?)
}

impl FingerprintAdvice {
    /// Advice over a caller-chosen field. Only `q >= n` is enforced, so the
    /// soundness bound `m(n-1)/q < 1/4` is the caller's responsibility.
    pub fn with_field(
        members: &[BitString],
        n: usize,
        f: usize,
        field: PrimeField,
    ) -> Result<Self> {
        if members.len() > 2 * f {
            return Err(Error::BudgetExceeded {
                members: members.len(),
                budget: 2 * f,
            });
        }
        let mut seen = HashSet::new();
        let mut fingerprints = Vec::with_capacity(members.len());
        for y in members {
            if y.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: y.len(),
                });
            }
            if !seen.insert(y.clone()) {
                return Err(Error::DuplicateMember(y.to_string()));
            }
            fingerprints.push(Fingerprint::over_field(y, field)?);
        }
        Ok(FingerprintAdvice {
            n,
            f,
            field,
            fingerprints,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn members(&self) -> impl Iterator<Item = &BitString> {
        self.fingerprints.iter().map(|fp| fp.source())
    }

    pub fn fingerprints(&self) -> &[Fingerprint] {
        &self.fingerprints
    }

    pub fn m(&self) -> usize {
        self.fingerprints.len()
    }

    /// Classical prefix `0^m 1`.
    pub fn marker(&self) -> BitString {
        let mut bits = vec![false; self.m()];
        bits.push(true);
        BitString::new(bits)
    }

    /// Total advice length in qubits: `(m + 1) + m * 2 ceil(log2 q)`.
    pub fn advice_qubits(&self) -> usize {
        self.m() + 1 + self.m() * 2 * self.field.register_qubits()
    }

    /// `c * f * max(1, ceil(log2 n)) + c`.
    pub fn length_bound(&self) -> usize {
        let log_n = (usize::BITS - (self.n.max(2) - 1).leading_zeros()) as usize;
        ADVICE_LENGTH_CONSTANT * self.f * log_n + ADVICE_LENGTH_CONSTANT
    }

    /// `m (n - 1) / q`, the bound on false acceptance.
    pub fn soundness_bound(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.m() as u64 * (self.n as u64 - 1)),
            BigInt::from(self.field.order()),
        )
    }

    /// The full advice qustring, marker included. Small instances only.
    pub fn state(&self) -> Result<Qustring> {
        let marker = self.marker();
        let mut state = Qustring::basis(marker.len(), marker.to_index() as usize);
        for fp in &self.fingerprints {
            if state.num_qubits() + fp.num_qubits() > MAX_DENSE_QUBITS {
                return Err(Error::ScaleExceeded(format!(
                    "advice has {} qubits; dense states stop at {MAX_DENSE_QUBITS}",
                    self.advice_qubits()
                )));
            }
            state = state.tensor(&fp.state()?);
        }
        Ok(state)
    }

    pub fn to_record(&self) -> AdviceRecord {
        AdviceRecord {
            n: self.n,
            f: self.f,
            q: self.field.order(),
            members: self.members().map(BitString::to_hex).collect(),
        }
    }

    pub fn from_record(record: &AdviceRecord) -> Result<Self> {
        let members = record
            .members
            .iter()
            .map(|h| BitString::from_hex(h, record.n))
            .collect::<Result<Vec<_>>>()?;
        FingerprintAdvice::with_field(&members, record.n, record.f, PrimeField::new(record.q)?)
    }
}

/// JSON form of an advice object. Fingerprint states are rebuilt from it,
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdviceRecord {
    pub n: usize,
    pub f: usize,
    pub q: u64,
    /// Members in hex, see [`BitString::to_hex`].
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipOutcome {
    /// One sampled run of the algorithm.
    pub decision: bool,
    /// Exact `1 - prod_i (1 - a_i / q)`.
    pub acceptance_probability: BigRational,
    /// `a_i = |{z : p_x(z) = p_{y_i}(z)}|` per fingerprint.
    pub agreements: Vec<u64>,
}

impl MembershipOutcome {
    pub fn probability_f64(&self) -> f64 {
        ratio_to_f64(&self.acceptance_probability)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact acceptance probability of `x` plus one sampled decision.
pub fn membership_test<R: Rng + ?Sized>(
    x: &BitString,
    advice: &FingerprintAdvice,
    rng: &mut R,
) -> Result<MembershipOutcome> {
    if x.len() != advice.n {
        return Err(Error::LengthMismatch {
            expected: advice.n,
            actual: x.len(),
        });
    }
    let q = advice.field.order();
    let agreements = advice
        .fingerprints
        .iter()
        .map(|fp| agreement_count(x, fp.source(), &advice.field))
        .collect::<Result<Vec<_>>>()?;
    let qb = BigInt::from(q);
    let reject: BigRational = agreements
        .iter()
        .map(|&a| BigRational::new(BigInt::from(q - a), qb.clone()))
        .fold(BigRational::one(), |acc, r| acc * r);
    let acceptance_probability = BigRational::one() - reject;

    // Measuring the first register of a fingerprint yields a uniform z and
    // collapses the second register to p_y(z).
    let mut decision = false;
    for fp in &advice.fingerprints {
        let z = rng.random_range(0..q);
        let held = poly_eval_unchecked(fp.source(), z, q);
        if poly_eval_unchecked(x, z, q) == held {
            decision = true;
            break;
        }
    }
    Ok(MembershipOutcome {
        decision,
        acceptance_probability,
        agreements,
    })
}

/// [`membership_test`] with a ChaCha8 generator seeded from `seed`.
pub fn membership_test_seeded(
    x: &BitString,
    advice: &FingerprintAdvice,
    seed: u64,
) -> Result<MembershipOutcome> {
    membership_test(x, advice, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Acceptance probability of the membership algorithm when the fingerprint
/// registers hold arbitrary (e.g. approximately prepared) states.
///
/// Register `i` accepts with the Born weight of outcomes `(z, p_x(z))` with
/// `z < q`; registers are measured independently, so the overall acceptance
/// is `1 - prod_i (1 - accept_i)`.
pub fn acceptance_with_states(
    x: &BitString,
    advice: &FingerprintAdvice,
    registers: &[Qustring],
) -> Result<f64> {
    if x.len() != advice.n {
        return Err(Error::LengthMismatch {
            expected: advice.n,
            actual: x.len(),
        });
    }
    if registers.len() != advice.m() {
        return Err(Error::LengthMismatch {
            expected: advice.m(),
            actual: registers.len(),
        });
    }
    let q = advice.field.order();
    let r = advice.field.register_qubits();
    let mut reject = 1.0;
    for state in registers {
        if state.num_qubits() != 2 * r {
            return Err(Error::LengthMismatch {
                expected: 2 * r,
                actual: state.num_qubits(),
            });
        }
        let accept: f64 = (0..q)
            .map(|z| {
                let v = poly_eval_unchecked(x, z, q).value();
                let amp: Complex64 = state.amplitude(((z << r) | v) as usize);
                amp.norm_sqr()
            })
            .sum();
        reject *= 1.0 - accept.min(1.0);
    }
    Ok(1.0 - reject)
}
