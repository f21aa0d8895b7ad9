//! Approximating states and small unitaries by circuits over the gate set.
//!
//! Both pipelines first produce an exact circuit of CNOTs and continuous
//! single-qubit rotations, then replace every rotation by a gate word from
//! [`sk`], with the error budget split evenly. The reported error is always
//! recomputed by simulating the final circuit.

pub mod kdtree;
pub mod net;
pub mod sk;
mod state;
pub mod su2;
mod unitary;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::quantum::{Circuit, Gate};
use crate::synthesis::net::base_net;
use crate::synthesis::sk::approximate_su2;
use crate::synthesis::su2::Su2;

pub use net::{base_net as shared_net, BaseNet, BASE_WORD_LENGTH, NET_CACHE_ENV};
pub use sk::{approximate_su2 as approximate, sk_approximate, Approximation};
pub use state::{synthesize_state, MAX_STATE_QUBITS};
pub use unitary::{synthesize_unitary, MAX_UNITARY_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    State,
    Unitary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub target_kind: TargetKind,
    pub k: usize,
    pub epsilon: f64,
    /// Recomputed from the simulated circuit, up to global phase.
    pub achieved_error: f64,
    #[serde(serialize_with = "circuit_text")]
    pub circuit: Circuit,
    pub size: usize,
    /// `2^{2k} log^3(1/eps)` for states, `2^{3k} log^3(1/eps)` for unitaries.
    pub bound_value: f64,
    pub constant_ratio: f64,
    /// Error of each approximated rotation, in circuit order.
    pub rotation_errors: Vec<f64>,
}

fn circuit_text<S: Serializer>(c: &Circuit, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

pub fn size_bound(kind: TargetKind, k: usize, epsilon: f64) -> f64 {
    let exp = match kind {
        TargetKind::State => 2 * k,
        TargetKind::Unitary => 3 * k,
    };
    2f64.powi(exp as i32) * (1.0 / epsilon).log2().powi(3)
}

impl SynthesisReport {
    fn new(
        target_kind: TargetKind,
        k: usize,
        epsilon: f64,
        achieved_error: f64,
        circuit: Circuit,
        rotation_errors: Vec<f64>,
    ) -> Self {
        let size = circuit.size();
        let bound_value = size_bound(target_kind, k, epsilon);
        SynthesisReport {
            target_kind,
            k,
            epsilon,
            achieved_error,
            circuit,
            size,
            bound_value,
            constant_ratio: size as f64 / bound_value,
            rotation_errors,
        }
    }
}

/// Exact intermediate form: CNOTs plus continuous single-qubit operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Op {
    Cnot {
        control: usize,
        target: usize,
    },
    Fixed(Gate),
    Rotate {
        qubit: usize,
        u: Su2,
        from_zero: bool,
    },
}

const ANGLE_CUTOFF: f64 = 1e-12;

/// Wraps to `(-pi, pi]`; rotations differing by a full turn differ by a sign.
fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r - t
    } else {
        r
    }
}

fn is_identity(u: Su2) -> bool {
    u.distance(Su2::IDENTITY) < ANGLE_CUTOFF
}

/// Uniformly controlled rotation about `axis`: for every control pattern `p`
/// (first control most significant), rotates `target` by `angles[p]`.
fn uniformly_controlled(
    axis: [f64; 3],
    target: usize,
    controls: &[usize],
    angles: &[f64],
) -> Vec<Op> {
    let j = controls.len();
    debug_assert_eq!(angles.len(), 1 << j);
    let n = 1usize << j;
    let mut ops = Vec::with_capacity(2 * n);
    for l in 0..n {
        let gray = l ^ (l >> 1);
        let phi: f64 = angles
            .iter()
            .enumerate()
            .map(|(p, &theta)| {
                if (p & gray).count_ones() % 2 == 0 {
                    theta
                } else {
                    -theta
                }
            })
            .sum::<f64>()
            / n as f64;
        ops.push(Op::Rotate {
            qubit: target,
            u: Su2::rotation(axis, wrap_angle(phi)),
            from_zero: false,
        });
        if j > 0 {
            let bit = if l + 1 == n {
                j - 1
            } else {
                (l + 1).trailing_zeros() as usize
            };
            ops.push(Op::Cnot {
                control: controls[j - 1 - bit],
                target,
            });
        }
    }
    ops
}

/// `diag(e^{i phases})` up to global phase, as a ladder of uniformly
/// controlled Z rotations on qubits `k-1, ..., 0`.
fn diagonal_ops(phases: &[f64]) -> Vec<Op> {
    let mut phases = phases.to_vec();
    let mut ops = Vec::new();
    while phases.len() > 1 {
        let half = phases.len() / 2;
        let m = half.trailing_zeros() as usize;
        let angles: Vec<f64> = (0..half)
            .map(|p| phases[2 * p + 1] - phases[2 * p])
            .collect();
        let controls: Vec<usize> = (0..m).collect();
        ops.extend(uniformly_controlled([0.0, 0.0, 1.0], m, &controls, &angles));
        phases = (0..half)
            .map(|p| (phases[2 * p] + phases[2 * p + 1]) / 2.0)
            .collect();
    }
    ops
}

/// Drops identity rotations, cancels CNOT pairs, and (when the input is
/// `|0...0>`) exploits qubits that are still untouched.
fn prune(ops: Vec<Op>, width: usize, zero_input: bool) -> Vec<Op> {
    let mut fresh = vec![zero_input; width];
    let mut out: Vec<Op> = Vec::with_capacity(ops.len());
    for op in ops {
        match op {
            Op::Rotate { qubit, u, .. } => {
                if is_identity(u) {
                    continue;
                }
                if fresh[qubit] && u.x.abs() < ANGLE_CUTOFF && u.y.abs() < ANGLE_CUTOFF {
                    // a Z rotation of |0> is a global phase
                    continue;
                }
                out.push(Op::Rotate {
                    qubit,
                    u,
                    from_zero: fresh[qubit],
                });
                fresh[qubit] = false;
            }
            Op::Cnot { control, target } => {
                if fresh[control] {
                    continue;
                }
                fresh[target] = false;
                out.push(op);
            }
            Op::Fixed(g) => {
                for q in g.qubits() {
                    fresh[q] = false;
                }
                out.push(op);
            }
        }
    }
    cancel_cnots(out)
}

/// Within every run of CNOTs sharing one target (no other op between them),
/// the CNOTs commute, so pairs with equal controls cancel.
fn cancel_cnots(ops: Vec<Op>) -> Vec<Op> {
    let mut out: Vec<Op> = Vec::with_capacity(ops.len());
    let mut i = 0;
    while i < ops.len() {
        if let Op::Cnot { target, .. } = ops[i] {
            let mut end = i;
            while let Some(Op::Cnot { target: t, .. }) = ops.get(end) {
                if *t != target {
                    break;
                }
                end += 1;
            }
            let mut parity: Vec<usize> = Vec::new();
            for op in &ops[i..end] {
                if let Op::Cnot { control, .. } = op {
                    if let Some(pos) = parity.iter().position(|c| c == control) {
                        parity.remove(pos);
                    } else {
                        parity.push(*control);
                    }
                }
            }
            out.extend(
                parity
                    .into_iter()
                    .map(|control| Op::Cnot { control, target }),
            );
            i = end;
        } else {
            out.push(ops[i]);
            i += 1;
        }
    }
    out
}

/// Replaces every rotation by a gate word within `epsilon / #rotations`.
/// Returns the circuit and the per-rotation errors.
fn compile(ops: &[Op], width: usize, epsilon: f64) -> Result<(Circuit, Vec<f64>)> {
    let rotations = ops
        .iter()
        .filter(|op| matches!(op, Op::Rotate { .. }))
        .count();
    let budget = epsilon / rotations.max(1) as f64;
    let net = base_net();
    let mut circuit = Circuit::new(width);
    let mut errors = Vec::with_capacity(rotations);
    for op in ops {
        match *op {
            Op::Cnot { control, target } => circuit.push(Gate::cnot(control, target))?,
            Op::Fixed(g) => circuit.push(g)?,
            Op::Rotate {
                qubit,
                u,
                from_zero,
            } => {
                let lookup = from_zero.then(|| net.nearest_state(u.bloch_of_zero()));
                let (word, err) = match lookup {
                    Some((idx, d)) if d < budget => (net.word(idx), d),
                    _ => {
                        let a = approximate_su2(u, budget)?;
                        (a.word, a.error)
                    }
                };
                for g in word {
                    circuit.push(Gate::Single(g, qubit))?;
                }
                errors.push(err);
            }
        }
    }
    Ok((circuit, errors))
}

/// Matrix of the exact (unapproximated) operators.
#[cfg(test)]
pub(crate) fn exact_unitary_of(ops: &[Op], width: usize) -> crate::quantum::CMatrix {
    use crate::quantum::linalg::kron;
    use crate::quantum::{unitary_of, CMatrix};
    let dim = 1 << width;
    let mut m = CMatrix::identity(dim, dim);
    for op in ops {
        let g = match *op {
            Op::Cnot { control, target } => {
                unitary_of(&Circuit::from_gates(width, vec![Gate::cnot(control, target)]).unwrap())
            }
            Op::Fixed(g) => unitary_of(&Circuit::from_gates(width, vec![g]).unwrap()),
            Op::Rotate { qubit, u, .. } => {
                let mut acc = CMatrix::identity(1, 1);
                for q in 0..width {
                    let f = if q == qubit {
                        u.to_matrix()
                    } else {
                        CMatrix::identity(2, 2)
                    };
                    acc = kron(&acc, &f);
                }
                acc
            }
        };
        m = g * m;
    }
    m
}

/// Applies the exact (unapproximated) operators to `|0^width>`.
#[cfg(test)]
pub(crate) fn exact_state_of(ops: &[Op], width: usize) -> crate::quantum::Qustring {
    use crate::quantum::circuit::apply_single;
    let mut state = crate::quantum::Qustring::zero(width);
    for op in ops {
        match *op {
            Op::Cnot { control, target } => {
                let c = Circuit::from_gates(width, vec![Gate::cnot(control, target)]).unwrap();
                state = c.apply(&state).unwrap();
            }
            Op::Fixed(g) => {
                state = Circuit::from_gates(width, vec![g])
                    .unwrap()
                    .apply(&state)
                    .unwrap();
            }
            Op::Rotate { qubit, u, .. } => {
                let m = u.to_matrix();
                let m = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
                apply_single(state.amps_mut(), width, qubit, &m);
            }
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::CMatrix;
    use rand::{Rng, SeedableRng};

    #[test]
    fn uniformly_controlled_rotation_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for j in 0..3 {
            let width = j + 1;
            let controls: Vec<usize> = (0..j).collect();
            let angles: Vec<f64> = (0..1 << j).map(|_| rng.random_range(-3.0..3.0)).collect();
            let ops = uniformly_controlled([0.0, 1.0, 0.0], j, &controls, &angles);
            let got = exact_unitary_of(&ops, width);
            let mut expected = CMatrix::zeros(1 << width, 1 << width);
            for (p, &theta) in angles.iter().enumerate() {
                let r = Su2::ry(theta).to_matrix();
                expected.view_mut((2 * p, 2 * p), (2, 2)).copy_from(&r);
            }
            let d = crate::quantum::phase_invariant_distance(&got, &expected).unwrap();
            assert!(d < 1e-9, "j={j}: {d}");
        }
    }

    #[test]
    fn cnot_runs_cancel() {
        let ops = vec![
            Op::Cnot {
                control: 0,
                target: 2,
            },
            Op::Cnot {
                control: 1,
                target: 2,
            },
            Op::Cnot {
                control: 0,
                target: 2,
            },
            Op::Cnot {
                control: 1,
                target: 0,
            },
        ];
        assert_eq!(
            cancel_cnots(ops),
            vec![
                Op::Cnot {
                    control: 1,
                    target: 2
                },
                Op::Cnot {
                    control: 1,
                    target: 0
                }
            ]
        );
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-10.0, -3.2, 0.0, 3.2, 7.0] {
            let w = wrap_angle(a);
            assert!(w > -std::f64::consts::PI - 1e-12 && w <= std::f64::consts::PI);
            assert!(((a - w) / std::f64::consts::TAU).fract().abs() < 1e-12);
        }
    }
}
