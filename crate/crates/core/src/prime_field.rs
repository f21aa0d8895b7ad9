//! Arithmetic in GF(q) for prime q, prime selection, and the fingerprint
//! polynomial `p_x(z) = sum_i x_i z^(i-1)`.
//!
//! Only prime fields are supported. Bertrand's postulate keeps the least
//! prime above `m` below `2m`, which is all the field sizing downstream needs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Witnesses that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test, valid on all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The least prime strictly greater than `m` (`m >= 1`).
pub fn least_prime_above(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "least_prime_above needs m >= 1".into(),
        ));
    }
    let mut c = m + 1;
    while !is_prime(c) {
        c = c
            .checked_add(1)
            .ok_or_else(|| Error::InvalidArgument(format!("no prime above {m} fits in u64")))?;
    }
    Ok(c)
}

/// The prime field GF(q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if is_prime(q) {
            Ok(PrimeField { q })
        } else {
            Err(Error::NotPrime { value: q })
        }
    }

    /// GF(p) for the least prime `p > m`.
    pub fn least_above(m: u64) -> Result<Self> {
        Ok(PrimeField {
            q: least_prime_above(m)?,
        })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Number of qubits needed for one register holding a field element.
    pub fn register_qubits(&self) -> usize {
        // ceil(log2 q); q >= 2 so this is at least 1
        (u64::BITS - (self.q - 1).leading_zeros()) as usize
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.q,
            q: self.q,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| FieldElement {
            value: v,
            q: self.q,
        })
    }

    fn check(&self, e: &FieldElement) -> Result<()> {
        if e.q == self.q {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                expected: self.q,
                actual: e.q,
            })
        }
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// An element of some GF(q); `0 <= value < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    q: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn add(self, other: FieldElement) -> FieldElement {
        debug_assert_eq!(self.q, other.q);
        FieldElement {
            value: ((self.value as u128 + other.value as u128) % self.q as u128) as u64,
            q: self.q,
        }
    }

    pub fn mul(self, other: FieldElement) -> FieldElement {
        debug_assert_eq!(self.q, other.q);
        FieldElement {
            value: mul_mod(self.value, other.value, self.q),
            q: self.q,
        }
    }
}

/// Horner evaluation of `p_x(z) = sum_{i=1}^{n} x_i z^(i-1)` over `field`.
pub fn poly_eval(x: &BitString, z: FieldElement, field: &PrimeField) -> Result<FieldElement> {
    field.check(&z)?;
    if x.is_empty() {
        return Err(Error::InvalidArgument(
            "polynomial of an empty string".into(),
        ));
    }
    Ok(poly_eval_unchecked(x, z.value, field.q))
}

pub(crate) fn poly_eval_unchecked(x: &BitString, z: u64, q: u64) -> FieldElement {
    let value = x.bits().iter().rev().fold(0u64, |acc, &bit| {
        let shifted = mul_mod(acc, z, q);
        if bit {
            (shifted + 1) % q
        } else {
            shifted
        }
    });
    FieldElement { value, q }
}

/// `|{z in GF(q) : p_x(z) = p_y(z)}|` by enumerating the whole field.
///
/// For `x != y` and `q >= n` this is at most `n - 1`.
pub fn agreement_count(x: &BitString, y: &BitString, field: &PrimeField) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument("agreement of empty strings".into()));
    }
    if (field.q as u128) < x.len() as u128 {
        return Err(Error::FieldTooSmall {
            q: field.q,
            n: x.len(),
        });
    }
    let q = field.q;
    Ok((0..q)
        .filter(|&z| poly_eval_unchecked(x, z, q) == poly_eval_unchecked(y, z, q))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn least_prime_examples() {
        assert_eq!(least_prime_above(1).unwrap(), 2);
        assert_eq!(least_prime_above(16).unwrap(), 17);
        assert_eq!(least_prime_above(24).unwrap(), 29);
        assert_eq!(least_prime_above(8).unwrap(), 11);
        assert_eq!(least_prime_above(128).unwrap(), 131);
        assert!(least_prime_above(0).is_err());
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        for n in [
            3_215_031_751u64,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
        ] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn bertrand_bound_up_to_a_million() {
        // Walk the primes once instead of searching from every m.
        let mut next_prime = 2u64;
        for m in 1..=1_000_000u64 {
            if next_prime <= m {
                next_prime = least_prime_above(m).unwrap();
            }
            assert!(next_prime > m && next_prime <= 2 * m, "m = {m}");
        }
    }

    #[test]
    fn poly_eval_examples() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(
            poly_eval(&bits("11"), f5.element(3), &f5).unwrap().value(),
            4
        );
        assert_eq!(
            poly_eval(&bits("10"), f5.element(3), &f5).unwrap().value(),
            1
        );
        for z in f5.elements() {
            assert_eq!(poly_eval(&bits("0000"), z, &f5).unwrap().value(), 0);
        }
        let f7 = PrimeField::new(7).unwrap();
        assert!(matches!(
            poly_eval(&bits("1"), f7.element(1), &f5),
            Err(Error::FieldMismatch { .. })
        ));
    }

    #[test]
    fn agreement_examples() {
        let f17 = PrimeField::new(17).unwrap();
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(
            agreement_count(&bits("1011"), &bits("1011"), &f17).unwrap(),
            17
        );
        assert_eq!(agreement_count(&bits("10"), &bits("01"), &f5).unwrap(), 1);
        assert_eq!(agreement_count(&bits("11"), &bits("10"), &f17).unwrap(), 1);
        assert!(matches!(
            agreement_count(&bits("1"), &bits("10"), &f5),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            agreement_count(&bits("1000001"), &bits("0100001"), &f5),
            Err(Error::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn register_width() {
        assert_eq!(PrimeField::new(2).unwrap().register_qubits(), 1);
        assert_eq!(PrimeField::new(3).unwrap().register_qubits(), 2);
        assert_eq!(PrimeField::new(17).unwrap().register_qubits(), 5);
        assert_eq!(PrimeField::new(131).unwrap().register_qubits(), 8);
        assert!(PrimeField::new(12).is_err());
    }

    #[test]
    fn degree_bound_fuzz() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=16usize);
            let x = BitString::new((0..n).map(|_| rng.random()).collect());
            let mut y = BitString::new((0..n).map(|_| rng.random()).collect());
            if x == y {
                let mut b = y.bits().to_vec();
                b[0] = !b[0];
                y = BitString::new(b);
            }
            let field = PrimeField::least_above(rng.random_range(n as u64..=64)).unwrap();
            let count = agreement_count(&x, &y, &field).unwrap();
            assert!(count < n as u64, "{x} vs {y} over {field}: {count}");
        }
    }

    proptest! {
        #[test]
        fn eval_is_additive_over_disjoint_supports(
            raw in proptest::collection::vec(0u8..3, 1..24),
            z in 0u64..1000,
        ) {
            // raw[i] == 1 puts bit i in x, raw[i] == 2 puts it in y
            let x = BitString::new(raw.iter().map(|&r| r == 1).collect());
            let y = BitString::new(raw.iter().map(|&r| r == 2).collect());
            let union = BitString::new(raw.iter().map(|&r| r != 0).collect());
            let field = PrimeField::new(1009).unwrap();
            let z = field.element(z);
            let lhs = poly_eval(&union, z, &field).unwrap();
            let rhs = poly_eval(&x, z, &field).unwrap().add(poly_eval(&y, z, &field).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
