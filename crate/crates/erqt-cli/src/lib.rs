//! Batch driver for the `erqt` transport library: parse a TOML scenario,
//! evaluate the requested current methods (optionally over a sweep), and emit
//! a deterministic CSV.
//!
//! The binary in `main.rs` is a thin wrapper over these modules so that
//! integration tests can drive the same code paths in-process.

pub mod config;
pub mod output;
pub mod runner;
