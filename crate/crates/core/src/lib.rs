//! Merkle–Hellman knapsack cipher and a genetic-algorithm attack that
//! recovers plaintext blocks by solving subset-sum over the public key.
//!
//! - [`problem`]: instances, chromosomes, evaluation
//! - [`oracle`]: exhaustive subset enumeration
//! - [`cipher`]: key generation, block encryption/decryption, message codec
//! - [`ga`]: the genetic algorithm
//! - [`attack`]: ciphertext-only recovery via the GA
//! - [`harness`]: parameter sweeps and experiment tables

pub mod attack;
pub mod cipher;
pub mod error;
pub mod ga;
pub mod harness;
pub mod oracle;
pub mod problem;
pub mod seed;

pub use error::{Error, Result};
pub use problem::{difference, evaluate, Chromosome, Instance, SolutionSet};
