//! Std companion to `rdtree-core`: model files, CSV reports, threaded sweeps
//! and the `rdtree` command line.

pub mod cli;
pub mod csv;
pub mod fixtures;
pub mod io;
pub mod parallel;

pub use cli::{run, Env};
