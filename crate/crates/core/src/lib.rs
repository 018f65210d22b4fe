//! Exact monoid combinatorics for logarithmic charts.

pub mod cone;
pub mod zlattice;
pub mod error;
pub mod fault;
pub mod monoid;
pub mod morphism;
pub mod covers;
pub mod cohomology;
pub mod io;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
