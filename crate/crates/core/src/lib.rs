pub mod amplitude;
pub mod bits;
pub mod cli;
pub mod error;
pub mod fingerprint;
pub mod prime_field;
pub mod qrac;
pub mod quantum;
pub mod separations;
pub mod synthesis;
pub mod tolerances;

pub use error::{Error, Result};
