//! Loss-tolerant wires: columns of `L` qubits with every qubit joined to
//! all of the next column, so a column survives while any qubit does.

mod crazy;
mod flow;
mod gadget;

pub use crazy::{
    build_crazy_graph, simulate_teleport, teleport_success_prob, wire_column_count, CrazyGraphSpec, TeleportStats,
};
pub use flow::{Flow, LogicalGate};
pub use gadget::{
    double_star, crazy_block, gadget_gate, s_gadget, verify_star_reduction, verify_s_gadget, wire_gate, GadgetGraph,
};
