//! Circuits in text and binary form.

use qadvice::quantum::{decode_circuit, encode_circuit, unitary_of, Circuit, Qustring};

fn main() -> qadvice::Result<()> {
    let text = "width 3\nH 0\nCNOT 0 1\nT 1\nCNOT 1 2\nSDG 2\nX 0\n";
    let circuit: Circuit = text.parse()?;
    let code = encode_circuit(&circuit)?;
    println!(
        "{} gates, {} bytes: {:02x?}",
        circuit.size(),
        code.len(),
        code.as_bytes()
    );
    let back = decode_circuit(&code)?;
    assert_eq!(back, circuit);
    let out = circuit.apply(&Qustring::zero(3))?;
    for (i, a) in out.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            println!("|{i:03b}>: {a:.4}");
        }
    }
    let u = unitary_of(&circuit);
    println!("unitary is {}x{}", u.nrows(), u.ncols());
    Ok(())
}
