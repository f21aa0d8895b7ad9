use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::circuit::Circuit;
use crate::quantum::state::Qustring;
use crate::tolerances::Tolerances;

pub type CMatrix = DMatrix<Complex64>;

/// The `2^w x 2^w` matrix `U(C)`, built column by column by simulation.
pub fn unitary_of(circuit: &Circuit) -> CMatrix {
    let w = circuit.width();
    let dim = 1usize << w;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = Qustring::basis(w, col);
        circuit.apply_in_place(&mut s);
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    m
}

/// Largest singular value of a square matrix.
///
/// Power method on `G = A^dagger A`. The iterate is first pushed through
/// `G^(2^SQUARINGS)` by repeated squaring, so nearly equal top singular
/// values cannot stall convergence, then polished with plain iterations.
/// The result is the square root of the final Rayleigh quotient.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let d = a.nrows();
    if d == 0 {
        return Ok(0.0);
    }
    let gram = a.adjoint() * a;
    let scale = max_modulus(&gram);
    if scale == 0.0 {
        return Ok(0.0);
    }
    // Irregular start so no eigenvector of a structured matrix is orthogonal to it.
    let start = nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|j| {
            let t = j as f64 + 1.0;
            Complex64::new(1.0 + 0.5 * (0.7 * t).sin(), 0.3 + 0.25 * (1.3 * t).cos())
        }),
    );
    let mut power = gram.unscale(scale);
    for _ in 0..SQUARINGS {
        power = &power * &power;
        let m = max_modulus(&power);
        if m == 0.0 {
            break;
        }
        power.unscale_mut(m);
    }
    let mut v = &power * &start;
    if v.norm() == 0.0 {
        v = start;
    }
    v.unscale_mut(v.norm());
    let mut lambda = 0.0;
    for _ in 0..POLISH_ITERATIONS {
        let w = &gram * &v;
        lambda = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w.unscale(norm);
    }
    Ok(lambda.max(0.0).sqrt())
}

const SQUARINGS: usize = 40;
const POLISH_ITERATIONS: usize = 8;

fn max_modulus(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `||A^dagger A - I||` measured entrywise by max modulus.
pub fn unitarity_deviation(a: &CMatrix) -> f64 {
    let d = a.nrows();
    let g = a.adjoint() * a - CMatrix::identity(d, d);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn check_unitary(a: &CMatrix, tol: &Tolerances) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let deviation = unitarity_deviation(a);
    if deviation <= tol.unitarity {
        Ok(())
    } else {
        Err(Error::NotUnitary { deviation })
    }
}

/// An upper bound on `min_phi ||a - e^{i phi} b||`, tight at the optimum.
///
/// The phase starts at `arg tr(b^dagger a)` and is refined by golden-section
/// search; the returned value is the operator norm at the final phase, so it
/// is always an honest (never optimistic) distance.
pub fn phase_invariant_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::LengthMismatch {
            expected: a.nrows(),
            actual: b.nrows(),
        });
    }
    let overlap = (b.adjoint() * a).trace();
    let centre = if overlap.norm() > 0.0 {
        overlap.arg()
    } else {
        0.0
    };
    let at = |phi: f64| -> Result<f64> {
        let rotated = b.map(|z| z * Complex64::from_polar(1.0, phi));
        operator_norm(&(a - rotated))
    };
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (
        centre - std::f64::consts::FRAC_PI_2,
        centre + std::f64::consts::FRAC_PI_2,
    );
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = at(x1)?;
    let mut f2 = at(x2)?;
    for _ in 0..64 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = at(x2)?;
        }
    }
    let best = f1.min(f2).min(at(centre)?);
    Ok(best)
}

/// 2x2 helper: row-major array to matrix.
pub fn matrix2(m: [Complex64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &m)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::circuit::{Gate, GateKind};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn svd_norm(a: &CMatrix) -> f64 {
        a.clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    #[test]
    fn every_gate_is_unitary() {
        for kind in GateKind::ALL {
            let c = match kind {
                GateKind::Cnot => Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap(),
                k => Circuit::from_gates(1, vec![Gate::Single(k, 0)]).unwrap(),
            };
            assert!(unitarity_deviation(&unitary_of(&c)) <= 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn operator_norm_examples() {
        for d in [1, 2, 4, 8] {
            let id = CMatrix::identity(d, d);
            assert!((operator_norm(&id).unwrap() - 1.0).abs() < 1e-12);
        }
        let diag =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((operator_norm(&diag).unwrap() - 2.0).abs() < 1e-12);

        let h = matrix2(GateKind::H.matrix2().unwrap());
        let h_minus_i = &h - CMatrix::identity(2, 2);
        let oracle = svd_norm(&h_minus_i);
        let got = operator_norm(&h_minus_i).unwrap();
        assert!((got - oracle).abs() <= 1e-8 * oracle, "{got} vs {oracle}");

        assert!(matches!(
            operator_norm(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_matches_svd_on_random_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let d = rng.random_range(1..=6);
            let a = CMatrix::from_fn(d, d, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let oracle = svd_norm(&a);
            let got = operator_norm(&a).unwrap();
            assert!(
                (got - oracle).abs() <= 1e-8 * oracle.max(1e-300),
                "{got} vs {oracle}"
            );
        }
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let t = unitary_of(&Circuit::from_gates(1, vec![Gate::t(0)]).unwrap());
        let shifted = t.map(|z| z * Complex64::from_polar(1.0, 1.234));
        assert!(phase_invariant_distance(&t, &shifted).unwrap() < 1e-7);
        let x = unitary_of(&Circuit::from_gates(1, vec![Gate::x(0)]).unwrap());
        // X vs I: eigenvalues of X are +1 and -1, best phase gives sqrt 2
        let d = phase_invariant_distance(&x, &CMatrix::identity(2, 2)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-6, "{d}");
    }
}
