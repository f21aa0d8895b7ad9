//! Solovay-Kitaev refinement with balanced group commutators.

use crate::error::{Error, Result};
use crate::quantum::{phase_invariant_distance, unitary_of, CMatrix, Circuit, Gate, GateKind};
use crate::synthesis::net::{base_net, BaseNet};
use crate::synthesis::su2::Su2;
use crate::tolerances::Tolerances;

/// Deepest recursion tried before giving up.
pub const MAX_DEPTH: usize = 10;

/// Commutator twists tried per recursion level. Depth-1 nodes are cheap and
/// gain the most from the search.
fn twists_at(depth: usize) -> usize {
    match depth {
        1 => 32,
        2 => 4,
        _ => 2,
    }
}

/// A word together with the element it was built to approximate.
#[derive(Debug, Clone)]
pub struct Approximation {
    /// Gates in application order.
    pub word: Vec<GateKind>,
    /// Phase-invariant operator-norm distance to the target.
    pub error: f64,
    pub depth: usize,
}

fn inverse_word(word: &[GateKind]) -> Vec<GateKind> {
    word.iter().rev().map(|g| g.inverse()).collect()
}

/// Peephole cleanup: cancels `g g^-1`, `H H`, `X X` and merges `T T -> S`,
/// `Tdg Tdg -> Sdg`. The operator is unchanged up to global phase.
pub fn simplify(word: &[GateKind]) -> Vec<GateKind> {
    use GateKind::*;
    let mut out: Vec<GateKind> = Vec::with_capacity(word.len());
    for &g in word {
        let mut g = Some(g);
        while let (Some(cur), Some(&top)) = (g, out.last()) {
            g = match (top, cur) {
                (a, b) if a.inverse() == b && a != H && a != X => None,
                (H, H) | (X, X) => None,
                (T, T) => Some(S),
                (Tdg, Tdg) => Some(Sdg),
                _ => break,
            };
            out.pop();
        }
        if let Some(g) = g {
            out.push(g);
        }
    }
    out
}

/// Finds `V, W` with `V W V^-1 W^-1 = delta`, both rotations by the same
/// small angle (Dawson-Nielsen balanced commutator). `twist` rotates the
/// pair about the axis of `delta`, which leaves the commutator unchanged.
pub fn group_commutator(delta: Su2, twist: f64) -> (Su2, Su2) {
    let delta = if delta.w < 0.0 { delta.neg() } else { delta };
    let (theta, axis) = delta.angle_axis();
    let s = (theta / 2.0).sin();
    // sin(theta/2) = 2 a sqrt(1 - a^2) with a = sin^2(phi/2)
    let a_sq = (1.0 - (1.0 - s * s).max(0.0).sqrt()) / 2.0;
    let phi = 2.0 * a_sq.sqrt().sqrt().clamp(0.0, 1.0).asin();
    let v = Su2::rotation([1.0, 0.0, 0.0], phi);
    let w = Su2::rotation([0.0, 1.0, 0.0], phi);
    let commutator = v * w * v.adjoint() * w.adjoint();
    let (_, c_axis) = commutator.angle_axis();
    let s_rot = Su2::rotation(axis, twist) * rotation_between(c_axis, axis);
    (s_rot * v * s_rot.adjoint(), s_rot * w * s_rot.adjoint())
}

/// Some rotation taking unit vector `from` to unit vector `to`.
fn rotation_between(from: [f64; 3], to: [f64; 3]) -> Su2 {
    let dot = (from[0] * to[0] + from[1] * to[1] + from[2] * to[2]).clamp(-1.0, 1.0);
    let cross = [
        from[1] * to[2] - from[2] * to[1],
        from[2] * to[0] - from[0] * to[2],
        from[0] * to[1] - from[1] * to[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    if cn < 1e-15 {
        if dot > 0.0 {
            return Su2::IDENTITY;
        }
        // antiparallel: half turn about any perpendicular axis
        let perp = if from[0].abs() < 0.9 {
            [0.0, from[2], -from[1]]
        } else {
            [-from[2], 0.0, from[0]]
        };
        let n = (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt();
        return Su2::rotation(
            [perp[0] / n, perp[1] / n, perp[2] / n],
            std::f64::consts::PI,
        );
    }
    let axis = [cross[0] / cn, cross[1] / cn, cross[2] / cn];
    Su2::rotation(axis, cn.atan2(dot))
}

/// Word of the requested recursion depth together with its element.
fn recurse(
    net: &BaseNet,
    target: Su2,
    depth: usize,
    twists: &dyn Fn(usize) -> usize,
) -> (Vec<GateKind>, Su2) {
    if depth == 0 {
        let (idx, _) = net.nearest(target);
        return (net.word(idx), net.element(idx));
    }
    let (prev_word, prev) = recurse(net, target, depth - 1, twists);
    let delta = target * prev.adjoint();
    let mut best: Option<(f64, Vec<GateKind>, Su2, Vec<GateKind>, Su2)> = None;
    let k = twists(depth);
    for j in 0..k {
        let twist = std::f64::consts::TAU * j as f64 / k as f64;
        let (v, w) = group_commutator(delta, twist);
        let (v_word, v_approx) = recurse(net, v, depth - 1, twists);
        let (w_word, w_approx) = recurse(net, w, depth - 1, twists);
        let c = v_approx * w_approx * v_approx.adjoint() * w_approx.adjoint();
        let err = (c * prev).distance(target);
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, v_word, v_approx, w_word, w_approx));
        }
    }
    let (_, v_word, v_approx, w_word, w_approx) = best.expect("at least one twist");
    // operator V W V^-1 W^-1 U_prev, so U_prev acts first
    let mut word = prev_word;
    word.extend(inverse_word(&w_word));
    word.extend(inverse_word(&v_word));
    word.extend(w_word);
    word.extend(v_word);
    let element = v_approx * w_approx * v_approx.adjoint() * w_approx.adjoint() * prev;
    (simplify(&word), element)
}

/// Approximates `target` to strictly better than `epsilon`, deepening the
/// recursion until the word (re-multiplied from its gates) is close enough.
pub fn approximate_su2(target: Su2, epsilon: f64) -> Result<Approximation> {
    check_precision(epsilon)?;
    approximate_with(base_net(), target, epsilon)
}

pub(crate) fn approximate_with(net: &BaseNet, target: Su2, epsilon: f64) -> Result<Approximation> {
    let mut best: Option<Approximation> = None;
    for depth in 0..=MAX_DEPTH {
        let (word, _) = recurse(net, target, depth, &twists_at);
        let error = Su2::of_word(&word).distance(target);
        if best.as_ref().is_none_or(|b| error < b.error) {
            best = Some(Approximation { word, error, depth });
        }
        let b = best.as_ref().expect("set above");
        if b.error < epsilon {
            return Ok(b.clone());
        }
    }
    Err(Error::SynthesisFailed {
        achieved: best.map_or(f64::INFINITY, |b| b.error),
        requested: epsilon,
    })
}

pub(crate) fn check_precision(epsilon: f64) -> Result<()> {
    let floor = Tolerances::DEFAULT.sk_precision_floor;
    if !(epsilon >= floor) {
        return Err(Error::UnsupportedPrecision {
            requested: epsilon,
            floor,
        });
    }
    Ok(())
}

/// Width-1 circuit whose unitary is within `epsilon` of `u` up to global
/// phase. The error is re-verified on the simulated circuit matrix.
pub fn sk_approximate(u: &CMatrix, epsilon: f64) -> Result<Circuit> {
    check_precision(epsilon)?;
    let target = Su2::from_matrix(u)?;
    let deviation = crate::quantum::linalg::unitarity_deviation(u);
    if deviation > Tolerances::DEFAULT.unitarity {
        return Err(Error::NotUnitary { deviation });
    }
    let approx = approximate_su2(target, epsilon)?;
    let circuit = word_circuit(&approx.word, 1, 0);
    let achieved = phase_invariant_distance(&unitary_of(&circuit), u)?;
    if achieved >= epsilon {
        return Err(Error::SynthesisFailed {
            achieved,
            requested: epsilon,
        });
    }
    Ok(circuit)
}

/// Places a single-qubit word on `qubit` of a `width`-qubit circuit.
pub fn word_circuit(word: &[GateKind], width: usize, qubit: usize) -> Circuit {
    let gates = word.iter().map(|&g| Gate::Single(g, qubit)).collect();
    Circuit::from_gates(width, gates).expect("qubit within width")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::matrix2;
    use rand::{Rng, SeedableRng};

    fn random_su2(rng: &mut impl Rng) -> Su2 {
        use rand_distr::{Distribution, StandardNormal};
        Su2::from_array([(); 4].map(|_| StandardNormal.sample(rng))).normalized()
    }

    #[test]
    fn commutator_reproduces_delta() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let axis = random_su2(&mut rng).angle_axis().1;
            let delta = Su2::rotation(axis, rng.random_range(0.0..0.5));
            let (v, w) = group_commutator(delta, rng.random_range(0.0..6.0));
            let back = v * w * v.adjoint() * w.adjoint();
            assert!(back.distance(delta) < 1e-10, "{}", back.distance(delta));
        }
        let (v, w) = group_commutator(Su2::IDENTITY, 0.0);
        assert!(v.distance(Su2::IDENTITY) < 1e-12 && w.distance(Su2::IDENTITY) < 1e-12);
    }

    #[test]
    fn simplify_keeps_the_operator() {
        use GateKind::*;
        let word = [T, T, H, H, S, Sdg, X, T, Tdg, X, Tdg, Tdg, H];
        let s = simplify(&word);
        assert_eq!(s, vec![H]);
        assert!(Su2::of_word(&s).distance(Su2::of_word(&word)) < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let w: Vec<GateKind> = (0..30)
                .map(|_| GateKind::SINGLE_QUBIT[rng.random_range(0..6)])
                .collect();
            assert!(Su2::of_word(&simplify(&w)).distance(Su2::of_word(&w)) < 1e-12);
        }
    }

    #[test]
    fn exact_words() {
        let h = matrix2(GateKind::H.matrix2().unwrap());
        let c = sk_approximate(&h, 1e-3).unwrap();
        assert_eq!(c.gates(), &[Gate::h(0)]);
        let t = matrix2(GateKind::T.matrix2().unwrap());
        let c = sk_approximate(&(&t * &t), 1e-3).unwrap();
        assert_eq!(c.gates(), &[Gate::s(0)]);
        assert!(phase_invariant_distance(&unitary_of(&c), &(&t * &t)).unwrap() < 1e-9);
    }

    #[test]
    fn precision_floor() {
        let h = matrix2(GateKind::H.matrix2().unwrap());
        assert!(matches!(
            sk_approximate(&h, 1e-7),
            Err(Error::UnsupportedPrecision { .. })
        ));
        assert!(sk_approximate(&h, 0.0).is_err());
        assert!(sk_approximate(&h, f64::NAN).is_err());
    }

    #[test]
    fn random_targets_converge() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for eps in [1e-1, 1e-2, 1e-3] {
            for _ in 0..10 {
                let q = random_su2(&mut rng);
                let a = approximate_su2(q, eps).unwrap();
                assert!(a.error < eps);
                let c = sk_approximate(&q.to_matrix(), eps).unwrap();
                assert!(phase_invariant_distance(&unitary_of(&c), &q.to_matrix()).unwrap() < eps);
            }
        }
    }
}
