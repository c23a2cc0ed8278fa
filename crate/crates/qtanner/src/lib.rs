//! Code files, experiment configuration and the Monte Carlo harness behind
//! the `qtanner` command.

pub mod analysis;
pub mod config;
pub mod group_file;
pub mod harness;
pub mod qtc;
