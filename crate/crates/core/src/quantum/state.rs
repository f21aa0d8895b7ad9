use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Exact description attached to states whose amplitudes are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactForm {
    /// Every nonzero amplitude equals `1/sqrt(support)` exactly.
    UniformOverSupport { support: u64 },
}

/// A pure state of `n` qubits ("qustring").
///
/// Basis index bit `n-1-j` belongs to qubit `j`, so qubit 0 is the leftmost
/// symbol of a ket.
#[derive(Debug, Clone, PartialEq)]
pub struct Qustring {
    n: usize,
    amps: Vec<Complex64>,
    exact: Option<ExactForm>,
}

impl Qustring {
    /// Wraps an amplitude vector after checking its length and norm.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(amps, Tolerances::DEFAULT.normalization)
    }

    pub fn with_tolerance(amps: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !((norm_sq - 1.0).abs() <= tolerance) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Qustring {
            n: len.trailing_zeros() as usize,
            amps,
            exact: None,
        })
    }

    /// Normalizes `amps` first; fails only for the zero vector.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(amps)
    }

    /// `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Self {
        assert!(index < 1 << n, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Qustring {
            n,
            amps,
            exact: Some(ExactForm::UniformOverSupport { support: 1 }),
        }
    }

    /// `|0^n>`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// Equal superposition over distinct basis indices, tagged as exact.
    pub fn uniform_over(n: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArgument("empty support".into()));
        }
        let amp = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for &i in support {
            if i >= amps.len() {
                return Err(Error::InvalidArgument(format!(
                    "basis index {i} out of range for {n} qubits"
                )));
            }
            if amps[i] != Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidArgument(format!("basis index {i} repeated")));
            }
            amps[i] = amp;
        }
        Ok(Qustring {
            n,
            amps,
            exact: Some(ExactForm::UniformOverSupport {
                support: support.len() as u64,
            }),
        })
    }

    /// Qubit count, the length of the qustring.
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn exact_form(&self) -> Option<ExactForm> {
        self.exact
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Qustring) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `|self> (x) |other>`.
    pub fn tensor(&self, other: &Qustring) -> Qustring {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Qustring {
            n: self.n + other.n,
            amps,
            exact: None,
        }
    }

    /// Euclidean norm of the amplitude difference.
    pub fn l2_distance(&self, other: &Qustring) -> Result<f64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `min_phi || |self> - e^{i phi} |other> ||`, equal to `sqrt(2 - 2|<self|other>|)`
    /// for unit vectors. Evaluated at the optimal phase as a sum of squares,
    /// which keeps full precision for nearly equal states.
    pub fn phase_invariant_distance(&self, other: &Qustring) -> Result<f64> {
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        self.exact = None;
        &mut self.amps
    }

    fn same_size(&self, other: &Qustring) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n,
                actual: other.n,
            })
        }
    }
}

/// Marginal Born-rule distribution of the listed qubits.
///
/// Keys list the measured bits in the order given; outcomes of probability
/// zero are omitted.
pub fn measure_probs(state: &Qustring, qubits: &[usize]) -> Result<BTreeMap<BitString, f64>> {
    if qubits.is_empty() {
        return Err(Error::InvalidArgument("empty qubit set".into()));
    }
    let n = state.num_qubits();
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, width: n });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::RepeatedQubit(q));
        }
    }
    let mut by_outcome = vec![0.0f64; 1 << qubits.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let key = qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1));
        by_outcome[key] += p;
    }
    Ok(by_outcome
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(k, p)| (BitString::from_index(k as u64, qubits.len()), p))
        .collect())
}
