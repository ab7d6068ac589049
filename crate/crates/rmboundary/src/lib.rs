//! Exact computations with real quadratic orders, pseudo-cubic orders, Hilbert modular
//! group cocycles and weighted boundary strata.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod exact;
pub mod lattices;
pub mod modvariety;
pub mod orders;
pub mod prym;
pub mod pseudocubic;

pub use error::{Error, Result};
