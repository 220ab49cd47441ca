#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod atoms;
pub mod electrostatic;
pub mod error;
pub mod green;
pub mod quadrature;
pub mod special;
pub mod vdw;

pub use error::{Error, Result};
