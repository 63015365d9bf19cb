pub mod algebra;
pub mod casimir;
pub mod checks;
pub mod contact;
pub mod diophantine;
pub mod equivariant;
pub mod invariants;
pub mod selftest;
pub mod symbols;
pub mod error;

pub use error::{Error, Result};
