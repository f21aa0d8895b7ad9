//! Unitaries on one or two qubits: an exact search over very short circuits,
//! then Givens elimination into two-level blocks, each realized as a
//! controlled single-qubit operator.

use crate::error::{Error, Result};
use crate::quantum::linalg::unitarity_deviation;
use crate::quantum::{phase_invariant_distance, unitary_of, CMatrix, Circuit, Gate, GateKind};
use crate::synthesis::sk::approximate_su2;
use crate::synthesis::su2::{zyz, Su2};
use crate::synthesis::{compile, diagonal_ops, prune, Op, SynthesisReport, TargetKind};
use crate::tolerances::Tolerances;

pub const MAX_UNITARY_QUBITS: usize = 2;

/// Gray order of the two-qubit basis, so neighbours differ in one qubit.
const GRAY: [usize; 4] = [0, 1, 3, 2];

/// Longest circuit tried by the exact search.
const EXACT_SEARCH_LENGTH: usize = 3;

fn all_gates(width: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..width {
        for kind in GateKind::SINGLE_QUBIT {
            gates.push(Gate::Single(kind, q));
        }
    }
    for c in 0..width {
        for t in 0..width {
            if c != t {
                gates.push(Gate::cnot(c, t));
            }
        }
    }
    gates
}

/// Shortest circuit equal to `u` up to global phase, if one of length at
/// most [`EXACT_SEARCH_LENGTH`] exists.
fn exact_search(u: &CMatrix, width: usize) -> Option<Circuit> {
    let dim = (1 << width) as f64;
    let gates = all_gates(width);
    let matches = |c: &Circuit| {
        let v = unitary_of(c);
        let overlap = (v.adjoint() * u).trace().norm() / dim;
        (1.0 - overlap).abs() < 1e-12
    };
    let mut layer: Vec<Vec<Gate>> = vec![vec![]];
    for _ in 0..=EXACT_SEARCH_LENGTH {
        for word in &layer {
            let c = Circuit::from_gates(width, word.clone()).expect("valid gates");
            if matches(&c) {
                return Some(c);
            }
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                gates.iter().map(move |&g| {
                    let mut next = w.clone();
                    next.push(g);
                    next
                })
            })
            .collect();
    }
    None
}

/// Applies `block` to `target` when `control` holds `value`, using the
/// ABC construction on a ZYZ decomposition.
fn controlled(block: &CMatrix, control: usize, value: usize, target: usize) -> Result<Vec<Op>> {
    let p = zyz(block)?;
    let a = Su2::rz(p.beta) * Su2::ry(p.gamma / 2.0);
    let b = Su2::ry(-p.gamma / 2.0) * Su2::rz(-(p.delta + p.beta) / 2.0);
    let c = Su2::rz((p.delta - p.beta) / 2.0);
    let rot = |qubit, u| Op::Rotate {
        qubit,
        u,
        from_zero: false,
    };
    let mut ops = Vec::new();
    if value == 0 {
        ops.push(Op::Fixed(Gate::x(control)));
    }
    ops.extend([
        rot(target, c),
        Op::Cnot { control, target },
        rot(target, b),
        Op::Cnot { control, target },
        rot(target, a),
        // diag(1, e^{i alpha}) on the control, up to global phase
        rot(control, Su2::rz(p.alpha)),
    ]);
    if value == 0 {
        ops.push(Op::Fixed(Gate::x(control)));
    }
    Ok(ops)
}

/// Exact ops with `U(ops) = e^{i g} u` for a two-qubit unitary.
fn two_level_ops(u: &CMatrix) -> Result<Vec<Op>> {
    let mut cur = u.clone();
    // (row a, row b, 2x2 block) with G applied to rows a, b
    let mut eliminations: Vec<(usize, usize, CMatrix)> = Vec::new();
    for i in 0..3 {
        let col = GRAY[i];
        for r in (i + 1..4).rev() {
            let (a, b) = (GRAY[r - 1], GRAY[r]);
            let (x, y) = (cur[(a, col)], cur[(b, col)]);
            if y.norm() < 1e-15 {
                continue;
            }
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let g = CMatrix::from_row_slice(2, 2, &[x.conj() / n, y.conj() / n, -y / n, x / n]);
            for c in 0..4 {
                let (ra, rb) = (cur[(a, c)], cur[(b, c)]);
                cur[(a, c)] = g[(0, 0)] * ra + g[(0, 1)] * rb;
                cur[(b, c)] = g[(1, 0)] * ra + g[(1, 1)] * rb;
            }
            eliminations.push((a, b, g));
        }
    }
    // G_m ... G_1 u = D, so u = G_1^dag ... G_m^dag D: D acts first
    let phases: Vec<f64> = (0..4).map(|i| cur[(i, i)].arg()).collect();
    let mut ops = diagonal_ops(&phases);
    for (a, b, g) in eliminations.into_iter().rev() {
        let pos = (a ^ b).trailing_zeros() as usize;
        let target = 1 - pos;
        let control = 1 - target;
        let mut block = g.adjoint();
        if (a >> pos) & 1 == 1 {
            // a holds the |1> of the target: reorder the block
            block = CMatrix::from_row_slice(
                2,
                2,
                &[block[(1, 1)], block[(1, 0)], block[(0, 1)], block[(0, 0)]],
            );
        }
        let value = (a >> (1 - control)) & 1;
        ops.extend(controlled(&block, control, value, target)?);
    }
    Ok(ops)
}

/// Circuit `C` over the gate set with `min_phase ||U(C) - e^{i phase} u|| < epsilon`.
pub fn synthesize_unitary(u: &CMatrix, epsilon: f64) -> Result<SynthesisReport> {
    let tol = Tolerances::DEFAULT;
    if !(epsilon >= tol.unitary_precision_floor) {
        return Err(Error::UnsupportedPrecision {
            requested: epsilon,
            floor: tol.unitary_precision_floor,
        });
    }
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let k = match u.nrows() {
        2 => 1,
        4 => 2,
        d => {
            return Err(Error::ScaleExceeded(format!(
                "unitary synthesis handles 1..={MAX_UNITARY_QUBITS} qubits, got dimension {d}"
            )))
        }
    };
    let deviation = unitarity_deviation(u);
    if deviation > tol.unitarity {
        return Err(Error::NotUnitary { deviation });
    }
    let (circuit, rotation_errors) = if k == 1 {
        let a = approximate_su2(Su2::from_matrix(u)?, epsilon)?;
        let gates = a.word.iter().map(|&g| Gate::Single(g, 0)).collect();
        (Circuit::from_gates(1, gates)?, vec![a.error])
    } else if let Some(c) = exact_search(u, k) {
        (c, vec![])
    } else {
        let ops = prune(two_level_ops(u)?, k, false);
        compile(&ops, k, epsilon)?
    };
    let achieved = phase_invariant_distance(&unitary_of(&circuit), u)?;
    if achieved >= epsilon {
        return Err(Error::SynthesisFailed {
            achieved,
            requested: epsilon,
        });
    }
    Ok(SynthesisReport::new(
        TargetKind::Unitary,
        k,
        epsilon,
        achieved,
        circuit,
        rotation_errors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::kron;
    use crate::synthesis::exact_unitary_of;
    use num_complex::Complex64;
    use rand::SeedableRng;

    fn random_unitary(dim: usize, rng: &mut impl rand::Rng) -> CMatrix {
        use rand_distr::{Distribution, StandardNormal};
        let m = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        m.qr().q()
    }

    #[test]
    fn two_level_decomposition_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let u = random_unitary(4, &mut rng);
            let ops = two_level_ops(&u).unwrap();
            let got = exact_unitary_of(&ops, 2);
            assert!(phase_invariant_distance(&got, &u).unwrap() < 1e-9);
        }
    }

    #[test]
    fn exact_targets() {
        let cnot = unitary_of(&Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap());
        let r = synthesize_unitary(&cnot, 1e-2).unwrap();
        assert_eq!(r.size, 1);
        assert!(r.achieved_error < 1e-9);

        let h = crate::quantum::linalg::matrix2(GateKind::H.matrix2().unwrap());
        let r = synthesize_unitary(&kron(&h, &h), 1e-2).unwrap();
        assert_eq!(r.size, 2);
        assert!(r.achieved_error < 1e-9);
    }

    #[test]
    fn random_targets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            let u = random_unitary(2, &mut rng);
            let r = synthesize_unitary(&u, 0.05).unwrap();
            assert!(r.achieved_error < 0.05);
        }
        for _ in 0..2 {
            let u = random_unitary(4, &mut rng);
            let r = synthesize_unitary(&u, 0.05).unwrap();
            assert!(r.achieved_error < 0.05);
            assert!(r.rotation_errors.iter().sum::<f64>() >= r.achieved_error);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let id = CMatrix::identity(2, 2);
        assert!(matches!(
            synthesize_unitary(&id, 1e-3),
            Err(Error::UnsupportedPrecision { .. })
        ));
        assert!(synthesize_unitary(&CMatrix::identity(8, 8), 0.1).is_err());
        assert!(synthesize_unitary(&(id * Complex64::new(2.0, 0.0)), 0.1).is_err());
    }
}
