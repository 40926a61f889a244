//! Exact super-algebra checks and a spectral index harness.

pub mod algebra_core;
pub mod charclass;
pub mod clifford;
pub mod error;
pub mod getzler;
pub mod index_harness;
pub mod mathai_quillen;
pub mod quadrature;

pub use error::{Error, Result};
