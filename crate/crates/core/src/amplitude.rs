//! A tally language packed into one rotation angle.
//!
//! Digit `h(n)` is `+1` when `0^{2^n}` is in the language and `-1`
//! otherwise, and `theta / 2pi = sum_n h(n) / 8^n`. Bit `k` is read by
//! rotating `|0>` by `8^{k-1} theta + pi/4` and measuring: the earlier
//! digits contribute whole turns, the later ones at most `1/56` of a turn.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::ratio_to_f64;
use crate::quantum::Qustring;
use crate::synthesis::{sk_approximate, su2::Su2};

/// Gate-set decoding budget. Above this the `2 eps` shift could erase the margin.
pub const MAX_GATESET_EPSILON: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyTheta {
    digits: Vec<i8>,
}

/// Sets membership pattern `membership[n-1]` for `0^{2^n}`, `n = 1..=N`.
pub fn encode_theta(membership: &[bool]) -> Result<TallyTheta> {
    if membership.is_empty() {
        return Err(Error::InvalidArgument("empty membership pattern".into()));
    }
    Ok(TallyTheta {
        digits: membership.iter().map(|&m| if m { 1 } else { -1 }).collect(),
    })
}

impl TallyTheta {
    pub fn horizon(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[i8] {
        &self.digits
    }

    pub fn is_member(&self, k: usize) -> Result<bool> {
        self.check_index(k)?;
        Ok(self.digits[k - 1] > 0)
    }

    /// `theta / 2pi` exactly, with denominator `8^N`.
    pub fn turns(&self) -> BigRational {
        let n = self.digits.len();
        let mut numer = BigInt::zero();
        for &d in &self.digits {
            numer = numer * 8 + d;
        }
        BigRational::new(numer, BigInt::from(8).pow(n as u32))
    }

    /// Same digits with every sign flipped.
    pub fn complement(&self) -> TallyTheta {
        TallyTheta {
            digits: self.digits.iter().map(|d| -d).collect(),
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.digits.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.digits.len(),
            });
        }
        Ok(())
    }

    /// `{8^{k-1} theta / 2pi}` in `[0, 1)`, computed in rationals.
    pub fn fractional_turn(&self, k: usize) -> Result<BigRational> {
        self.check_index(k)?;
        let scaled = self.turns() * BigRational::from_integer(BigInt::from(8).pow(k as u32 - 1));
        let (numer, denom) = (scaled.numer(), scaled.denom());
        Ok(BigRational::new(numer.mod_floor(denom), denom.clone()))
    }
}

impl fmt::Display for TallyTheta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            f.write_str(if d > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for TallyTheta {
    type Err = Error;

    /// Parses a digit string such as `+-+-`.
    fn from_str(s: &str) -> Result<Self> {
        let membership = s
            .chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                other => Err(Error::InvalidArgument(format!(
                    "digit {other:?} is neither + nor -"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        encode_theta(&membership)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Decoded {
    pub k: usize,
    /// Probability of measuring 1.
    pub acceptance_probability: f64,
    pub decision: bool,
    #[serde(serialize_with = "ratio_text")]
    pub exact_frac: BigRational,
}

fn ratio_text<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Rotation angle `2pi frac + pi/4` for bit `k`.
fn decoder_angle(frac: &BigRational) -> f64 {
    std::f64::consts::TAU * ratio_to_f64(frac) + std::f64::consts::FRAC_PI_4
}

/// Exact decoder for bit `k`: `Pr[1] = sin^2(2pi frac + pi/4)`.
pub fn decode_bit(theta: &TallyTheta, k: usize) -> Result<Decoded> {
    let frac = theta.fractional_turn(k)?;
    let p = decoder_angle(&frac).sin().powi(2);
    Ok(Decoded {
        k,
        acceptance_probability: p,
        decision: p >= 0.5,
        exact_frac: frac,
    })
}

/// Decodes every bit `1..=N`.
pub fn decode_all(theta: &TallyTheta) -> Result<Vec<Decoded>> {
    (1..=theta.horizon())
        .map(|k| decode_bit(theta, k))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GatesetDecoded {
    pub k: usize,
    pub epsilon: f64,
    /// Probability of measuring 1 after the approximating circuit.
    pub probability: f64,
    pub exact_probability: f64,
    pub decision: bool,
    pub circuit_size: usize,
}

/// Decodes bit `k` with the rotation replaced by a gate-set circuit within
/// `epsilon` in operator norm. The simulated probability is checked to lie
/// within `2 epsilon` of the exact one.
pub fn decode_via_gateset(theta: &TallyTheta, k: usize, epsilon: f64) -> Result<GatesetDecoded> {
    if !(epsilon > 0.0 && epsilon <= MAX_GATESET_EPSILON) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1/6], got {epsilon}"
        )));
    }
    let exact = decode_bit(theta, k)?;
    // Ry(2a)|0> = cos a |0> + sin a |1>
    let rotation = Su2::ry(2.0 * decoder_angle(&exact.exact_frac)).to_matrix();
    let circuit = sk_approximate(&rotation, epsilon)?;
    let out = circuit.apply(&Qustring::zero(1))?;
    let probability = out.amplitude(1).norm_sqr();
    let shift = (probability - exact.acceptance_probability).abs();
    if shift > 2.0 * epsilon {
        return Err(Error::SynthesisFailed {
            achieved: shift / 2.0,
            requested: epsilon,
        });
    }
    Ok(GatesetDecoded {
        k,
        epsilon,
        probability,
        exact_probability: exact.acceptance_probability,
        decision: probability >= 0.5,
        circuit_size: circuit.size(),
    })
}
