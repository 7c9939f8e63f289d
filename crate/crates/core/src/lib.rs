//! Numerical core for two-copy purification of Werner states and noisy
//! PR-boxes.
//!
//! Works without `std`; needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boxworld;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod nogo;
pub mod sampling;
pub mod scalar;
pub mod werner;
pub mod wirings;

pub use error::{Error, Result};
