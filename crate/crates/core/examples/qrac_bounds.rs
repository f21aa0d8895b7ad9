//! Random access codes against the entropy bound.
//!
//! Prints the success of the standard (2,1) and (3,1) codes, the best
//! success found by the multi-start search, and the fewest qubits the
//! entropy bound allows for that success.

use std::f64::consts::PI;
use std::time::Instant;

use qadvice::qrac::{
    binary_entropy, nayak_min_qubits, rac21_scheme, rac31_scheme, rac_search, scheme_success,
    DEFAULT_STARTS,
};

fn main() -> qadvice::Result<()> {
    println!("1 - H(1/3) = {:.6}", 1.0 - binary_entropy(1.0 / 3.0)?);
    for (name, scheme) in [("rac21", rac21_scheme()), ("rac31", rac31_scheme())] {
        let p = scheme_success(&scheme)?;
        println!(
            "{name}: success {p:.9}, entropy bound needs m >= {}",
            nayak_min_qubits(scheme.n(), p)?
        );
    }
    println!("n,m,best_p,bound_floor,seconds");
    for n in 1..=3 {
        let start = Instant::now();
        let r = rac_search(n, 1, PI / 180.0, DEFAULT_STARTS, 2024)?;
        let floor = (1.0 - binary_entropy(r.best_p)?) * n as f64;
        println!(
            "{n},1,{:.9},{floor:.6},{:.2}",
            r.best_p,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
