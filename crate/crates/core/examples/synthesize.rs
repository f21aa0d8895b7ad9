//! Gate-set synthesis of states and small unitaries.
//!
//! Prepares random 1- to 4-qubit states at precision 0.1 and random 1- and
//! 2-qubit unitaries at 0.05, printing each circuit size against the
//! `4^k log^3(1/eps)` and `8^k log^3(1/eps)` scales.

use num_complex::Complex64;
use qadvice::quantum::{CMatrix, Qustring};
use qadvice::synthesis::{synthesize_state, synthesize_unitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn main() -> qadvice::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=4 {
        let amps = (0..1 << k).map(|_| gaussian(&mut rng)).collect();
        let target = Qustring::normalized(amps)?;
        let r = synthesize_state(&target, 0.1)?;
        println!(
            "state k={k}: {:6} gates, error {:.3e}, size / bound = {:.3}",
            r.size, r.achieved_error, r.constant_ratio
        );
    }
    for k in 1..=2 {
        let dim = 1 << k;
        let u = CMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng))
            .qr()
            .q();
        let r = synthesize_unitary(&u, 0.05)?;
        println!(
            "unitary k={k}: {:6} gates, error {:.3e}, size / bound = {:.3}",
            r.size, r.achieved_error, r.constant_ratio
        );
    }
    Ok(())
}
