//! Counting and diagonalization against advised classifiers.
//!
//! Compares the number of sparse sets with the number of advice strings,
//! then finds the first sparse set that none of eight random classifiers
//! realizes with any advice, and rechecks it pair by pair.

use qadvice::separations::{
    counting_inequality, diagonal_sparse_set, subset_strings, verify_escape, AdvisedClassifier,
    DiagonalOutcome,
};

fn main() -> qadvice::Result<()> {
    for (n, f) in [(1, 1), (2, 2), (4, 1), (8, 2), (12, 4)] {
        let c = counting_inequality(n, f)?;
        println!(
            "n={n:2} f={f}: {} sparse sets vs {} advice strings, holds {}",
            c.lhs, c.rhs, c.holds
        );
    }
    let (n, f) = (4, 1);
    let family = AdvisedClassifier::random_family(8, n, 3, 42)?;
    let d = diagonal_sparse_set(&family, n, f)?;
    println!(
        "{} distinct realized sets, {} candidates examined",
        d.realized_total, d.candidates_examined
    );
    match d.outcome {
        DiagonalOutcome::Found(set) => {
            let transcript = verify_escape(&family, &set).expect("escaping set verifies");
            println!(
                "escaping set {:?}; {} (classifier, advice) pairs each err somewhere",
                subset_strings(&set, n),
                transcript.len()
            );
        }
        DiagonalOutcome::NotFound => println!("no sparse set escapes"),
    }
    Ok(())
}
