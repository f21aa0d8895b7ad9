//! A tally language stored in one angle.
//!
//! Encodes a membership pattern into signed base-8 digits, decodes every
//! bit exactly, then decodes a few bits again with the rotation replaced by
//! a gate-set circuit.

use qadvice::amplitude::{decode_all, decode_via_gateset, encode_theta};

fn main() -> qadvice::Result<()> {
    let pattern = [
        true, false, true, true, false, false, true, false, true, true, false, true,
    ];
    let theta = encode_theta(&pattern)?;
    println!("digits {theta}, theta/2pi = {}", theta.turns());
    for d in decode_all(&theta)? {
        println!(
            "k = {:2}: frac {:>12}, Pr[1] = {:.6}, decision {}",
            d.k,
            d.exact_frac.to_string(),
            d.acceptance_probability,
            d.decision
        );
    }
    for k in [1, 2, 6] {
        let g = decode_via_gateset(&theta, k, 1e-2)?;
        println!(
            "gate set, k = {k}: Pr[1] = {:.6} (exact {:.6}) with {} gates",
            g.probability, g.exact_probability, g.circuit_size
        );
    }
    Ok(())
}
