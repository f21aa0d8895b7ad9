//! Short advice end to end: build fingerprint advice for a set of 2-bit
//! strings over GF(7), prepare each fingerprint register with a gate-set
//! circuit at precision 1/6, and run the membership test against the
//! prepared registers instead of the ideal ones.

use std::time::Instant;

use qadvice::bits::BitString;
use qadvice::fingerprint::{acceptance_with_states, membership_test_seeded, FingerprintAdvice};
use qadvice::prime_field::PrimeField;
use qadvice::quantum::Qustring;
use qadvice::synthesis::synthesize_state;

fn main() -> qadvice::Result<()> {
    let epsilon = 1.0 / 6.0;
    let members = vec!["10".parse::<BitString>()?];
    let advice = FingerprintAdvice::with_field(&members, 2, 1, PrimeField::new(7)?)?;
    println!(
        "advice: m = {}, q = {}, {} qubits, soundness bound {}",
        advice.m(),
        advice.field().order(),
        advice.advice_qubits(),
        advice.soundness_bound()
    );

    let start = Instant::now();
    let mut registers = Vec::new();
    for fp in advice.fingerprints() {
        let report = synthesize_state(&fp.state()?, epsilon)?;
        println!(
            "fingerprint of {}: {} gates on {} qubits, error {:.2e}",
            fp.source(),
            report.size,
            report.k,
            report.achieved_error
        );
        registers.push(report.circuit.apply(&Qustring::zero(report.k))?);
    }
    println!("synthesis took {:.2} s", start.elapsed().as_secs_f64());

    let mut worst: f64 = 0.0;
    for x in 0..4 {
        let x = BitString::from_index(x, 2);
        let member = advice.members().any(|y| *y == x);
        let ideal = membership_test_seeded(&x, &advice, 0)?.probability_f64();
        let prepared = acceptance_with_states(&x, &advice, &registers)?;
        let error = if member { 1.0 - prepared } else { prepared };
        worst = worst.max(error);
        println!(
            "{x}: member {member}, ideal {ideal:.4}, prepared {prepared:.4}, error {error:.4}"
        );
    }
    println!("worst error {worst:.4} (target at most 1/3)");
    Ok(())
}
