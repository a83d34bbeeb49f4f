//! Stabilizer engine for graph states with local Clifford frames.
//!
//! [`GraphRegister`] is the sparse engine used everywhere else;
//! [`DenseStabilizerState`] is an independent tableau used to check it on
//! small registers.

mod clifford;
mod dense;
mod edgelist;
mod lc;
mod pauli;
mod register;

pub use clifford::Clifford;
pub use dense::{canonical_group, DenseOutcome, DenseStabilizerState, MAX_DENSE_QUBITS};
pub use edgelist::{read_edge_list, write_annotated, write_edge_list, Annotations};
pub use lc::{lc_equivalent, MAX_LC_VERTICES};
pub use pauli::{Pauli, PauliString};
pub use register::{Basis, GraphRegister, Measurement};
