//! Random access codes: the entropy bound, the two standard one-qubit
//! schemes, and a numerical search over one-qubit schemes.
//!
//! Bit `i` of an input `x` (1-based) is the `i`-th most significant bit of
//! its index, as in [`BitString::from_index`](crate::bits::BitString::from_index).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::Qustring;
use crate::tolerances::Tolerances;

/// Largest number of encoded bits handled by [`rac_search`].
pub const MAX_SEARCH_BITS: usize = 3;

/// Multi-start count used when callers have no preference.
pub const DEFAULT_STARTS: usize = 64;

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let term = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.log2() };
    Ok((term(p) + term(1.0 - p)).clamp(0.0, 1.0))
}

/// Fewest qubits an `(n, m, p)` code can use: `ceil((1 - H(p)) n)`.
pub fn nayak_min_qubits(n: usize, p: f64) -> Result<usize> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "the bound needs 1/2 < p <= 1, got {p}"
        )));
    }
    let floor = (1.0 - binary_entropy(p)?) * n as f64;
    Ok((floor - Tolerances::DEFAULT.ceiling_slack).ceil().max(0.0) as usize)
}

/// Two-outcome projective measurement given by an orthonormal basis whose
/// vectors are labelled with the outcome bit.
#[derive(Debug, Clone)]
pub struct Measurement {
    basis: Vec<Qustring>,
    labels: Vec<bool>,
}

impl Measurement {
    pub fn new(basis: Vec<Qustring>, labels: Vec<bool>) -> Result<Self> {
        if basis.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                actual: labels.len(),
            });
        }
        Ok(Measurement { basis, labels })
    }

    /// One-qubit measurement: outcome 0 on `zero`, outcome 1 on `one`.
    pub fn pair(zero: Qustring, one: Qustring) -> Self {
        Measurement {
            basis: vec![zero, one],
            labels: vec![false, true],
        }
    }

    /// Measures along a Bloch axis: outcome 0 on the `+axis` state.
    pub fn along(axis: [f64; 3]) -> Self {
        let minus = [-axis[0], -axis[1], -axis[2]];
        Measurement::pair(bloch_state(axis), bloch_state(minus))
    }

    pub fn basis(&self) -> &[Qustring] {
        &self.basis
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Largest entry of `|G - I|` for the Gram matrix `G`, or infinity when
    /// the basis is incomplete or mixes widths.
    fn orthonormality_deviation(&self, m: usize) -> f64 {
        if self.basis.len() != 1 << m || self.basis.iter().any(|b| b.num_qubits() != m) {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let g = a.inner(b).expect("equal widths");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Probability that measuring `state` yields `outcome`.
    pub fn probability(&self, state: &Qustring, outcome: bool) -> Result<f64> {
        let mut p = 0.0;
        for (v, &label) in self.basis.iter().zip(&self.labels) {
            if label == outcome {
                p += v.inner(state)?.norm_sqr();
            }
        }
        Ok(p)
    }
}

/// Pure one-qubit state with unit Bloch vector `r`.
pub fn bloch_state(r: [f64; 3]) -> Qustring {
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]);
    let amps = vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ];
    Qustring::normalized(amps).expect("nonzero amplitudes")
}

#[derive(Debug, Clone)]
pub struct RacScheme {
    n: usize,
    m: usize,
    encoder: Vec<Qustring>,
    measurements: Vec<Measurement>,
}

impl RacScheme {
    /// Checks widths, normalization and basis orthonormality.
    pub fn new(
        n: usize,
        m: usize,
        encoder: Vec<Qustring>,
        measurements: Vec<Measurement>,
    ) -> Result<Self> {
        if n == 0 || n > 20 || m == 0 {
            return Err(Error::InvalidArgument(format!(
                "unsupported code shape n={n}, m={m}"
            )));
        }
        if encoder.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                actual: encoder.len(),
            });
        }
        if measurements.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: measurements.len(),
            });
        }
        let tol = Tolerances::DEFAULT;
        for state in &encoder {
            if state.num_qubits() != m {
                return Err(Error::WidthMismatch {
                    circuit: m,
                    state: state.num_qubits(),
                });
            }
            let norm_sq = state.norm_sqr();
            if (norm_sq - 1.0).abs() > tol.normalization {
                return Err(Error::NotNormalized { norm_sq });
            }
        }
        let scheme = RacScheme {
            n,
            m,
            encoder,
            measurements,
        };
        scheme.check_bases(&tol)?;
        Ok(scheme)
    }

    fn check_bases(&self, tol: &Tolerances) -> Result<()> {
        for (i, meas) in self.measurements.iter().enumerate() {
            let deviation = meas.orthonormality_deviation(self.m);
            if !(deviation <= tol.basis_orthonormality) {
                return Err(Error::MalformedBasis {
                    index: i + 1,
                    deviation,
                });
            }
        }
        Ok(())
    }

    /// One-qubit scheme from Bloch vectors of the codewords and measurement axes.
    pub fn from_bloch(codewords: &[[f64; 3]], axes: &[[f64; 3]]) -> Result<Self> {
        let n = axes.len();
        RacScheme::new(
            n,
            1,
            codewords.iter().map(|&r| bloch_state(r)).collect(),
            axes.iter().map(|&a| Measurement::along(a)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn encoder(&self) -> &[Qustring] {
        &self.encoder
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    /// Bit `i` (1-based, most significant first) of input `x`.
    pub fn bit(&self, x: usize, i: usize) -> bool {
        (x >> (self.n - i)) & 1 == 1
    }

    /// `Pr[O_i(enc(x)) = x_i]` by the Born rule.
    pub fn correct_probability(&self, x: usize, i: usize) -> Result<f64> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n,
            });
        }
        self.measurements[i - 1].probability(&self.encoder[x], self.bit(x, i))
    }
}

fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// The `(2,1)` code: `b1 b2` goes to Bloch vector `((-1)^b2, 0, (-1)^b1)/sqrt 2`,
/// read with Z for bit 1 and X for bit 2.
pub fn rac21_scheme() -> RacScheme {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let codewords: Vec<[f64; 3]> = (0..4)
        .map(|x| [sign(x & 1 == 1) * s, 0.0, sign(x & 2 == 2) * s])
        .collect();
    RacScheme::from_bloch(&codewords, &[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        .expect("valid construction")
}

/// The `(3,1)` code: Bloch vector `((-1)^b2, (-1)^b3, (-1)^b1)/sqrt 3`, read
/// with Z, X and Y.
pub fn rac31_scheme() -> RacScheme {
    let s = 1.0 / 3f64.sqrt();
    let codewords: Vec<[f64; 3]> = (0..8)
        .map(|x| {
            [
                sign(x & 2 == 2) * s,
                sign(x & 1 == 1) * s,
                sign(x & 4 == 4) * s,
            ]
        })
        .collect();
    RacScheme::from_bloch(
        &codewords,
        &[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    )
    .expect("valid construction")
}

/// Worst-case success `min_{x,i} Pr[O_i(enc(x)) = x_i]`.
pub fn scheme_success(s: &RacScheme) -> Result<f64> {
    s.check_bases(&Tolerances::DEFAULT)?;
    let mut worst = f64::INFINITY;
    for x in 0..s.encoder.len() {
        for i in 1..=s.n {
            worst = worst.min(s.correct_probability(x, i)?);
        }
    }
    Ok(worst.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct RacSearchResult {
    pub n: usize,
    pub m: usize,
    pub best_p: f64,
    /// Index of the start that produced `best_p` (lowest on ties).
    pub best_start: usize,
    /// Worst-case success reached from each start.
    pub per_start: Vec<f64>,
    #[serde(skip)]
    pub best_scheme: RacScheme,
}

/// Soft-min temperatures, annealed from smooth to nearly exact.
const TEMPERATURES: [f64; 8] = [5e-2, 1e-2, 2e-3, 4e-4, 8e-5, 1.6e-5, 3e-6, 1e-6];
const MAX_SWEEPS: usize = 200;
const GOLDEN_STEPS: usize = 40;

/// Searches one-qubit codes for `n <= 3` bits. Codewords and measurement
/// axes are spherical angles; each start is a random point of the angle
/// grid with spacing `resolution`, improved by coordinate ascent on a
/// soft-min of the success probabilities.
pub fn rac_search(
    n: usize,
    m: usize,
    resolution: f64,
    starts: usize,
    seed: u64,
) -> Result<RacSearchResult> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if n == 0 || n > MAX_SEARCH_BITS || m != 1 {
        return Err(Error::ScaleExceeded(format!(
            "search covers 1 <= n <= {MAX_SEARCH_BITS} with m = 1, got n={n}, m={m}"
        )));
    }
    if starts == 0 {
        return Err(Error::InvalidArgument("at least one start".into()));
    }
    let runs: Vec<(f64, Vec<f64>)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let steps = (TAU / resolution).ceil() as i64;
            let init: Vec<f64> = (0..2 * ((1 << n) + n))
                .map(|_| rng.random_range(0..steps) as f64 * resolution)
                .collect();
            let params = ascend(n, init, resolution);
            (Layout::new(n).worst(&params), params)
        })
        .collect();
    let mut best_start = 0;
    for (s, run) in runs.iter().enumerate() {
        if run.0 > runs[best_start].0 {
            best_start = s;
        }
    }
    let layout = Layout::new(n);
    let params = &runs[best_start].1;
    let codewords: Vec<[f64; 3]> = (0..1 << n).map(|x| layout.codeword(params, x)).collect();
    let axes: Vec<[f64; 3]> = (0..n).map(|i| layout.axis(params, i)).collect();
    let best_scheme = RacScheme::from_bloch(&codewords, &axes)?;
    Ok(RacSearchResult {
        n,
        m,
        best_p: scheme_success(&best_scheme)?,
        best_start,
        per_start: runs.iter().map(|r| r.0).collect(),
        best_scheme,
    })
}

/// Parameter vector: `(theta, phi)` per codeword, then per measurement axis.
struct Layout {
    n: usize,
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

impl Layout {
    fn new(n: usize) -> Self {
        Layout { n }
    }

    fn codeword(&self, p: &[f64], x: usize) -> [f64; 3] {
        unit(p[2 * x], p[2 * x + 1])
    }

    fn axis(&self, p: &[f64], i: usize) -> [f64; 3] {
        let base = 2 << self.n;
        unit(p[base + 2 * i], p[base + 2 * i + 1])
    }

    /// Success of every `(x, i)` pair, `(1 + s r.a) / 2`.
    fn successes(&self, p: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let axes: Vec<[f64; 3]> = (0..self.n).map(|i| self.axis(p, i)).collect();
        for x in 0..1usize << self.n {
            let r = self.codeword(p, x);
            for (i, a) in axes.iter().enumerate() {
                let dot = r[0] * a[0] + r[1] * a[1] + r[2] * a[2];
                let s = sign((x >> (self.n - 1 - i)) & 1 == 1);
                out.push(0.5 * (1.0 + s * dot));
            }
        }
    }

    fn worst(&self, p: &[f64]) -> f64 {
        let mut buf = Vec::new();
        self.successes(p, &mut buf);
        buf.into_iter().fold(f64::INFINITY, f64::min)
    }
}

fn soft_min(values: &[f64], tau: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = values.iter().map(|v| (-(v - lo) / tau).exp()).sum();
    lo - tau * sum.ln()
}

/// Annealed coordinate ascent; returns the parameters with the best true
/// worst case seen at the end of any stage.
fn ascend(n: usize, mut params: Vec<f64>, resolution: f64) -> Vec<f64> {
    let layout = Layout::new(n);
    let mut buf = Vec::new();
    let mut best = (layout.worst(&params), params.clone());
    for (stage, &tau) in TEMPERATURES.iter().enumerate() {
        let mut objective = |p: &[f64]| {
            layout.successes(p, &mut buf);
            soft_min(&buf, tau)
        };
        let mut current = objective(&params);
        for _ in 0..MAX_SWEEPS {
            let before = current;
            for c in 0..params.len() {
                let (half_width, points) = if stage == 0 {
                    (PI, (PI / resolution).ceil() as usize)
                } else {
                    (2.0 * resolution, 4)
                };
                let v = params[c];
                let mut eval = |t: f64| {
                    params[c] = t;
                    objective(&params)
                };
                let (t, val) = line_search(&mut eval, v, half_width, points);
                if val > current {
                    params[c] = t;
                    current = val;
                } else {
                    params[c] = v;
                }
            }
            if current - before <= 1e-14 {
                break;
            }
        }
        let worst = layout.worst(&params);
        if worst > best.0 {
            best = (worst, params.clone());
        }
    }
    best.1
}

/// Grid scan of `[v - w, v + w]` with `2 points + 1` samples, refined by a
/// golden-section search around the best sample.
fn line_search(f: &mut impl FnMut(f64) -> f64, v: f64, w: f64, points: usize) -> (f64, f64) {
    let h = w / points as f64;
    let mut best = (v, f(v));
    for k in 1..=points {
        for t in [v - k as f64 * h, v + k as f64 * h] {
            let val = f(t);
            if val > best.1 {
                best = (t, val);
            }
        }
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    for (t, val) in [(c, fc), (d, fd)] {
        if val > best.1 {
            best = (t, val);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(1 + r.a)/2` for Bloch vectors: the Born rule on the sphere.
    fn bloch_oracle(r: [f64; 3], a: [f64; 3], agree: bool) -> f64 {
        let dot = r[0] * a[0] + r[1] * a[1] + r[2] * a[2];
        0.5 * (1.0 + if agree { dot } else { -dot })
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let third =
            -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((binary_entropy(1.0 / 3.0).unwrap() - third).abs() < 1e-15);
        assert!((binary_entropy(1.0 / 3.0).unwrap() - 0.918296).abs() < 1e-6);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn minimum_qubits() {
        for n in [1, 5, 17] {
            assert_eq!(nayak_min_qubits(n, 1.0).unwrap(), n);
        }
        assert_eq!(nayak_min_qubits(2, 0.853553).unwrap(), 1);
        assert_eq!(nayak_min_qubits(100, 2.0 / 3.0).unwrap(), 9);
        assert!(nayak_min_qubits(3, 0.5).is_err());
    }

    #[test]
    fn standard_codes_match_the_sphere() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let s3 = 1.0 / 3f64.sqrt();
        for (scheme, expected) in [
            (rac21_scheme(), 0.5 + 0.5 * s2),
            (rac31_scheme(), 0.5 + 0.5 * s3),
        ] {
            let n = scheme.n();
            let axes: Vec<[f64; 3]> = match n {
                2 => vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
                _ => vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            };
            for x in 0..1usize << n {
                let bits: Vec<f64> = (0..n).map(|i| sign((x >> (n - 1 - i)) & 1 == 1)).collect();
                let r = if n == 2 {
                    [bits[1] * s2, 0.0, bits[0] * s2]
                } else {
                    [bits[1] * s3, bits[2] * s3, bits[0] * s3]
                };
                for i in 1..=n {
                    let p = scheme.correct_probability(x, i).unwrap();
                    let oracle = bloch_oracle(r, axes[i - 1], bits[i - 1] > 0.0);
                    assert!(
                        (p - oracle).abs() < 1e-12,
                        "n={n} x={x} i={i} p={p} oracle={oracle}"
                    );
                    assert!((p - expected).abs() < 1e-9);
                }
            }
            assert!((scheme_success(&scheme).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn trivial_and_constant_codes() {
        let z = Measurement::along([0.0, 0.0, 1.0]);
        let one_bit = RacScheme::new(
            1,
            1,
            vec![Qustring::basis(1, 0), Qustring::basis(1, 1)],
            vec![z.clone()],
        )
        .unwrap();
        assert_eq!(scheme_success(&one_bit).unwrap(), 1.0);
        let constant = RacScheme::new(
            2,
            1,
            vec![Qustring::zero(1); 4],
            vec![z.clone(), Measurement::along([1.0, 0.0, 0.0])],
        )
        .unwrap();
        assert!(scheme_success(&constant).unwrap() <= 0.5);
    }

    #[test]
    fn malformed_basis_rejected() {
        let skew = Measurement::pair(Qustring::zero(1), bloch_state([1.0, 0.0, 0.0]));
        let r = RacScheme::new(
            1,
            1,
            vec![Qustring::zero(1), Qustring::basis(1, 1)],
            vec![skew],
        );
        assert!(matches!(r, Err(Error::MalformedBasis { index: 1, .. })));
    }

    #[test]
    fn search_small_cases() {
        let one = rac_search(1, 1, PI / 180.0, 4, 1).unwrap();
        assert!(one.best_p > 1.0 - 1e-9);
        let two = rac_search(2, 1, PI / 180.0, 8, 1).unwrap();
        assert!(
            two.best_p >= 0.8535 && two.best_p <= 0.8536 + 1e-3,
            "{}",
            two.best_p
        );
        let again = rac_search(2, 1, PI / 180.0, 8, 1).unwrap();
        assert_eq!(two.best_p, again.best_p);
        assert_eq!(two.per_start, again.per_start);
        assert!(rac_search(2, 1, 0.0, 8, 1).is_err());
        assert!(rac_search(4, 1, 0.1, 8, 1).is_err());
        assert!(rac_search(2, 2, 0.1, 8, 1).is_err());
    }
}
