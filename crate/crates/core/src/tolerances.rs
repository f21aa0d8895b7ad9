//! Every numeric tolerance used by the crate, in one record.
//!
//! Reports embed the table in force so numbers can be audited without the
//! source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of `sum |a_i|^2` from 1 for float-backed states.
    pub normalization: f64,
    /// Norm drift allowed after applying a circuit.
    pub norm_preservation: f64,
    /// `||U^dagger U - I||` allowed for gate and target matrices.
    pub unitarity: f64,
    /// Deviation from orthonormality allowed in a measurement basis.
    pub basis_orthonormality: f64,
    /// Relative accuracy targeted by the power iteration in `operator_norm`.
    pub operator_norm_relative: f64,
    /// Finest single-qubit precision the Solovay-Kitaev path accepts.
    pub sk_precision_floor: f64,
    /// Finest precision accepted for state synthesis.
    pub state_precision_floor: f64,
    /// Finest precision accepted for two-qubit unitary synthesis.
    pub unitary_precision_floor: f64,
    /// Two amplitudes closer than this are treated as equal (exact matches).
    pub exact_match: f64,
    /// Slack used before taking a ceiling of a float expression.
    pub ceiling_slack: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-10,
        norm_preservation: 1e-9,
        unitarity: 1e-9,
        basis_orthonormality: 1e-9,
        operator_norm_relative: 1e-8,
        sk_precision_floor: 1e-6,
        state_precision_floor: 1e-3,
        unitary_precision_floor: 1e-2,
        exact_match: 1e-12,
        ceiling_slack: 1e-12,
    };

    /// Returns a copy with the named field replaced.
    pub fn with_override(mut self, key: &str, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {key} must be positive, got {value}"
            )));
        }
        let slot = match key {
            "normalization" => &mut self.normalization,
            "norm_preservation" => &mut self.norm_preservation,
            "unitarity" => &mut self.unitarity,
            "basis_orthonormality" => &mut self.basis_orthonormality,
            "operator_norm_relative" => &mut self.operator_norm_relative,
            "sk_precision_floor" => &mut self.sk_precision_floor,
            "state_precision_floor" => &mut self.state_precision_floor,
            "unitary_precision_floor" => &mut self.unitary_precision_floor,
            "exact_match" => &mut self.exact_match,
            "ceiling_slack" => &mut self.ceiling_slack,
            other => return Err(Error::InvalidArgument(format!("unknown tolerance {other}"))),
        };
        *slot = value;
        Ok(self)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
