//! Simulation toolkit for a ballistic photonic cluster-state architecture.
//!
//! Small three-photon entangled resources are fused into a bond-percolated
//! three dimensional lattice. The crate covers the stabilizer engine used to
//! hold those states, a bosonic linear-optics oracle, fusion rules, the wafer
//! builder, percolation analytics, source multiplexing and loss-tolerant
//! encodings, plus the experiment harness behind the `ballistic` binary.

pub mod builder;
pub mod error;
pub mod fock;
pub mod fusion;
pub mod graph_state;
pub mod harness;
pub mod loss_tolerance;
pub mod multiplex;
pub mod percolation;
pub mod rng;

pub use error::{Error, Result};
