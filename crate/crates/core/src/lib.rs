//! Long-range multivariate Hawkes processes on a one-dimensional lattice.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod io;
pub mod kernel;
pub mod lattice;
pub mod meanfield;
pub mod quad;
pub mod simulator;
pub mod special;
pub mod stable;
pub mod verify;

pub use error::{Error, Result};
