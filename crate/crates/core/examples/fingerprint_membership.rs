//! Sparse-set membership from fingerprint advice.
//!
//! Builds the advice for four random 8-bit members with budget f = 2,
//! then prints the exact acceptance probability of every member and the
//! largest one over all non-members, next to the bound m(n-1)/q.

use std::collections::BTreeSet;

use qadvice::bits::BitString;
use qadvice::fingerprint::{build_advice, membership_test};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qadvice::Result<()> {
    let (n, f) = (8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut chosen = BTreeSet::new();
    while chosen.len() < 2 * f {
        chosen.insert(rng.random_range(0..1u64 << n));
    }
    let members: Vec<BitString> = chosen
        .iter()
        .map(|&x| BitString::from_index(x, n))
        .collect();
    let advice = build_advice(&members, n, f)?;
    println!(
        "q = {}, advice length {} qubits (bound {}), record {}",
        advice.field().order(),
        advice.advice_qubits(),
        advice.length_bound(),
        serde_json::to_string(&advice.to_record()).expect("record serializes")
    );
    for y in &members {
        let out = membership_test(y, &advice, &mut rng)?;
        println!("member {y}: Pr[accept] = {}", out.acceptance_probability);
    }
    let mut worst = (0.0, BitString::zeros(n));
    let mut accepted = 0;
    for x in (0..1u64 << n).filter(|x| !chosen.contains(x)) {
        let x = BitString::from_index(x, n);
        let out = membership_test(&x, &advice, &mut rng)?;
        accepted += out.decision as usize;
        if out.probability_f64() > worst.0 {
            worst = (out.probability_f64(), x);
        }
    }
    println!(
        "worst non-member {}: {:.4} <= {:.4}; {accepted} of {} sampled runs accepted",
        worst.1,
        worst.0,
        qadvice::separations::ratio_f64(&advice.soundness_bound()),
        (1 << n) - members.len()
    );
    Ok(())
}
