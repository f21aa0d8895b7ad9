//! State preparation by uniformly controlled rotations: a ladder of Ry
//! layers fixes the magnitudes, then a ladder of Rz layers fixes the
//! relative phases.

use crate::error::{Error, Result};
use crate::quantum::Qustring;
use crate::synthesis::{
    compile, diagonal_ops, prune, uniformly_controlled, Op, SynthesisReport, TargetKind,
};
use crate::tolerances::Tolerances;

/// Largest state handled. Four qubits is the intended desk scale; six
/// admits the fingerprint registers of a GF(7) advice state.
pub const MAX_STATE_QUBITS: usize = 6;

const Y_AXIS: [f64; 3] = [0.0, 1.0, 0.0];

/// Exact rotation circuit with `C|0^k> = e^{i g} target`.
fn exact_ops(target: &Qustring) -> Vec<Op> {
    let k = target.num_qubits();
    let amps = target.amplitudes();
    let mag_sq: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let mut ops = Vec::new();

    // weight[p] over prefixes of length j + 1
    for j in 0..k {
        let suffix = k - j - 1;
        let angles: Vec<f64> = (0..1usize << j)
            .map(|p| {
                let block = |b: usize| -> f64 {
                    let start = ((p << 1) | b) << suffix;
                    mag_sq[start..start + (1 << suffix)]
                        .iter()
                        .sum::<f64>()
                        .sqrt()
                };
                2.0 * block(1).atan2(block(0))
            })
            .collect();
        let controls: Vec<usize> = (0..j).collect();
        ops.extend(uniformly_controlled(Y_AXIS, j, &controls, &angles));
    }

    let phases: Vec<f64> = amps
        .iter()
        .map(|a| if a.norm() > 1e-14 { a.arg() } else { 0.0 })
        .collect();
    ops.extend(diagonal_ops(&phases));
    ops
}

/// Circuit `C` over the gate set with `min_phase ||C|0^k> - e^{i phase} target|| < epsilon`.
pub fn synthesize_state(target: &Qustring, epsilon: f64) -> Result<SynthesisReport> {
    let tol = Tolerances::DEFAULT;
    if !(epsilon >= tol.state_precision_floor) {
        return Err(Error::UnsupportedPrecision {
            requested: epsilon,
            floor: tol.state_precision_floor,
        });
    }
    let k = target.num_qubits();
    if k == 0 || k > MAX_STATE_QUBITS {
        return Err(Error::ScaleExceeded(format!(
            "state synthesis handles 1..={MAX_STATE_QUBITS} qubits, got {k}"
        )));
    }
    let norm_sq = target.norm_sqr();
    if (norm_sq - 1.0).abs() > tol.normalization {
        return Err(Error::NotNormalized { norm_sq });
    }
    let ops = prune(exact_ops(target), k, true);
    let (circuit, rotation_errors) = compile(&ops, k, epsilon)?;
    let prepared = circuit.apply(&Qustring::zero(k))?;
    let achieved = prepared.phase_invariant_distance(target)?;
    if achieved >= epsilon {
        return Err(Error::SynthesisFailed {
            achieved,
            requested: epsilon,
        });
    }
    Ok(SynthesisReport::new(
        TargetKind::State,
        k,
        epsilon,
        achieved,
        circuit,
        rotation_errors,
    ))
}
