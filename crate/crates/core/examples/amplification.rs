//! Majority-vote amplification with fresh advice copies.

use num_bigint::BigInt;
use num_rational::BigRational;
use qadvice::separations::{
    advice_copies_for, hoeffding_floor, majority_amplify, ratio_f64, simulate_majority,
};

fn main() -> qadvice::Result<()> {
    let p = BigRational::new(BigInt::from(2), BigInt::from(3));
    for t in [1, 3, 5, 11, 51, 101] {
        let v = majority_amplify(&p, t)?;
        println!(
            "t = {t:3}: {:.9} (Hoeffding floor {:.6})",
            ratio_f64(&v),
            hoeffding_floor(2.0 / 3.0, t).max(0.0)
        );
    }
    for k in [4, 10, 20] {
        let eps = BigRational::new(BigInt::from(1), BigInt::from(1u64 << k));
        let t = advice_copies_for(&eps, &p)?;
        let exact = ratio_f64(&majority_amplify(&p, t)?);
        let sim = simulate_majority(2.0 / 3.0, t, 1_000_000, exact, k)?;
        println!(
            "error 2^-{k}: {t} copies, exact {exact:.7}, simulated {:.7} (3 sigma ok: {})",
            sim.estimate, sim.within_three_sigma
        );
    }
    Ok(())
}
