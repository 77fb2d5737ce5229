//! Numerical laboratory for weighted Fock spaces and restricted Muckenhoupt weights.

pub mod error;
pub mod quadcore;
pub mod apclass;
pub mod weights;
pub mod fockcore;
pub mod carleson_mult;

pub use error::{Error, NumericalFailure, Result};
