//! Quantum Tanner codes over left-right Cayley complexes, and a local-ensemble
//! decoder that runs small decoders on every vertex view, merges their soft
//! output into a damped prior, and finishes with a global BP + post-processing
//! pass.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the Monte Carlo
//! harness and the command line live in the companion `qtanner` crate.
//!
//! Module map:
//! * [`gf2`] bit-packed vectors and matrices over GF(2);
//! * [`codes`] classical component codes, duals and tensor products;
//! * [`complex`] Cayley complexes, CSS assembly and per-vertex view covers;
//! * [`decode`] min-sum/product-sum BP with OSD and LSD post-processing;
//! * [`lead`] the local/aggregate/global decoding pipeline;
//! * [`channel`] depolarizing sampling and residual classification;
//! * [`stats`] small statistics helpers shared by the harness.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod codes;
pub mod complex;
pub mod decode;
mod error;
pub mod gf2;
pub mod lead;
pub mod stats;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec, EchelonForm};
