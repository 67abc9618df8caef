//! Cut-and-project schemes, pure point measures and their Fourier transforms, with
//! finite-scale classification tools.

pub mod classify;
pub mod cli;
pub mod cps;
pub mod error;
pub mod group;
pub mod harmonic;
pub mod lattice;
pub mod measure;

pub use error::{Error, Result};
