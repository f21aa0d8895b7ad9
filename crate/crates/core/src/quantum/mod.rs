//! Dense state vectors, the universal gate set {H, T, T†, S, S†, X, CNOT},
//! circuits, Born-rule marginals, distances, and the binary circuit code.

pub mod circuit;
pub mod codec;
pub mod linalg;
pub mod state;

pub use circuit::{apply, Circuit, Gate, GateKind};
pub use codec::{decode_circuit, encode_circuit, CircuitCode};
pub use linalg::{operator_norm, phase_invariant_distance, unitary_of, CMatrix};
pub use state::{measure_probs, ExactForm, Qustring};
