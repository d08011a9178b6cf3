//! Spectral analysis of the hexagonal quantum graph in a constant magnetic
//! field.
//!
//! The graph spectrum reduces to three layers: the Hill discriminant of the
//! edge potential, the spectrum of a quasi-periodic Jacobi operator indexed by
//! the flux, and a flux-independent Dirichlet point spectrum carried by
//! compactly supported loop states. This crate implements each layer without
//! `std`; file formats and the command line live in the `hexspec` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bands;
pub mod dynamics;
pub mod error;
pub mod flux;
pub mod graph;
pub mod hill;
pub mod jacobi;
pub mod linalg;
pub mod loops;
pub mod potential;
pub mod qlambda;
mod roots;

pub use bands::{BandList, Interval};
pub use error::{Error, Result};
pub use flux::Flux;
pub use hill::{HillBand, HillSolver, MonodromySolution, Monotonicity};
pub use potential::PotentialSpec;
