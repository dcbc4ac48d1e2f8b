//! Derivation-based noncommutative differential geometry on matrix algebras
//! and endomorphism bundles.

pub mod bundle;
pub mod characteristic;
pub mod cohomology;
pub mod connection;
pub mod encoding;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod lattice;
pub mod lie;
pub mod linalg;
pub mod reduction;

pub use error::{Error, Result};
