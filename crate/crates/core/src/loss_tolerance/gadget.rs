use rand::Rng;

use super::crazy::{build_crazy_graph, CrazyGraphSpec};
use super::flow::{Flow, LogicalGate};
use crate::graph_state::{
    lc_equivalent, read_edge_list, write_annotated, Annotations, Basis, GraphRegister, Pauli,
};
use crate::rng::trial_rng;
use crate::{Error, Result};

const RECORDS: usize = 24;
const ORACLE_SEED: u64 = 0x5ca1ab1e;

/// A prepared piece of cluster state with the vertices a wire attaches to,
/// the vertices it hands on to, and measurements made before attachment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetGraph {
    pub register: GraphRegister,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub premeasure: Vec<(usize, Pauli)>,
    pub lost: Vec<usize>,
}

impl GadgetGraph {
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let (register, ann) = read_edge_list(text)?;
        let g = GadgetGraph {
            register,
            inputs: ann.inputs,
            outputs: ann.outputs,
            premeasure: ann.premeasure,
            lost: Vec::new(),
        };
        if let Some(&(v, _)) = g.premeasure.iter().find(|(v, _)| g.inputs.contains(v) || g.outputs.contains(v)) {
            return Err(Error::Spec(format!("vertex {v} is both pre-measured and an attachment vertex")));
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let ann = Annotations {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            premeasure: self.premeasure.clone(),
        };
        write_annotated(&self.register, &ann)
    }

    pub fn mark_lost(&mut self, v: usize) {
        if !self.lost.contains(&v) {
            self.lost.push(v);
        }
    }

    /// Checks the gadget can still be used: no pre-measured or attachment
    /// vertex was lost.
    pub fn check_usable(&self) -> Result<()> {
        for &v in &self.lost {
            if self.premeasure.iter().any(|&(u, _)| u == v) {
                return Err(Error::VertexState { vertex: v, reason: "pre-measured vertex was lost, gadget rejected" });
            }
            if self.inputs.contains(&v) || self.outputs.contains(&v) {
                return Err(Error::VertexState { vertex: v, reason: "attachment vertex was lost, gadget rejected" });
            }
        }
        Ok(())
    }

    /// Applies the pre-measurements in the graph engine, leaving the
    /// register ready to attach.
    pub fn prepare(&self, rng: &mut impl Rng) -> Result<GraphRegister> {
        self.check_usable()?;
        let mut reg = self.register.clone();
        for &v in &self.lost {
            reg.remove_lost(v)?;
        }
        for &(v, p) in &self.premeasure {
            let basis = match p {
                Pauli::X => Basis::X,
                Pauli::Y => Basis::Y,
                Pauli::Z => Basis::Z,
                Pauli::I => continue,
            };
            reg.measure_pauli(v, basis, rng)?;
        }
        Ok(reg)
    }
}

fn twin_chain(widths: &[usize]) -> (GraphRegister, Vec<Vec<usize>>) {
    let mut cols = Vec::new();
    let mut next = 0;
    for &w in widths {
        cols.push((next..next + w).collect::<Vec<_>>());
        next += w;
    }
    let mut edges = Vec::new();
    for pair in cols.windows(2) {
        for &a in &pair[0] {
            for &b in &pair[1] {
                edges.push((a, b));
            }
        }
    }
    let reg = GraphRegister::from_edges(next, &edges).expect("chain edges are distinct");
    (reg, cols)
}

/// Gadget applying S to a width-`l` wire: columns of `l`, then one central
/// qubit measured in Y, then two more columns of `l`. The input wire
/// attaches to the first column and the encoded result sits on the last.
pub fn s_gadget(l: usize) -> Result<GadgetGraph> {
    if l == 0 {
        return Err(Error::Spec("gadget width must be >= 1".into()));
    }
    let (register, cols) = twin_chain(&[l, 1, l, l]);
    Ok(GadgetGraph {
        register,
        inputs: cols[0].clone(),
        outputs: cols[3].clone(),
        premeasure: vec![(cols[1][0], Pauli::Y)],
        lost: Vec::new(),
    })
}

/// Dense-oracle flow for a gadget: the input wire qubit comes first, the
/// gadget vertices follow, and every vertex that is neither pre-measured
/// nor an output is measured in X after attachment.
fn gadget_flow(g: &GadgetGraph) -> Result<Flow> {
    g.check_usable()?;
    let n = g.register.vertex_count();
    let sh = |v: usize| v + 1;
    let pre: Vec<usize> = g.premeasure.iter().map(|&(v, _)| v).collect();
    let measure = std::iter::once((0, Pauli::X))
        .chain(
            (0..n)
                .filter(|v| !pre.contains(v) && !g.outputs.contains(v) && !g.lost.contains(v))
                .map(|v| (sh(v), Pauli::X)),
        )
        .collect();
    Ok(Flow {
        qubits: n + 1,
        input: 0,
        edges: g.register.edges().map(|(a, b)| (sh(a), sh(b))).collect(),
        premeasure: g.premeasure.iter().map(|&(v, p)| (sh(v), p)).collect(),
        attach: g.inputs.iter().map(|&v| sh(v)).collect(),
        measure,
        output: g.outputs.iter().map(|&v| sh(v)).collect(),
    })
}

/// Logical gate a gadget applies, up to a Pauli frame, checked on the
/// dense oracle over seeded outcome records.
pub fn gadget_gate(g: &GadgetGraph) -> Result<Option<LogicalGate>> {
    let flow = gadget_flow(g)?;
    flow.logical_gate(RECORDS, &mut trial_rng(ORACLE_SEED, g.register.vertex_count() as u64))
}

/// Attaches the width-`l` S gadget to a wire qubit prepared in each Pauli
/// eigenstate and checks the decoded output is S of the input up to the
/// Pauli frame fixed by the outcomes.
pub fn verify_s_gadget(l: usize) -> Result<bool> {
    Ok(gadget_gate(&s_gadget(l)?)? == Some(LogicalGate::Phase))
}

/// Gate carried by a width-`l` wire of `columns` columns fed from one
/// input qubit: Hadamard for an odd count, identity for an even one.
pub fn wire_gate(l: usize, columns: usize) -> Result<Option<LogicalGate>> {
    let reg = build_crazy_graph(&CrazyGraphSpec::new(columns, l, 0.0))?;
    let last = columns - 1;
    let g = GadgetGraph {
        register: reg,
        inputs: (0..l).collect(),
        outputs: (last * l..columns * l).collect(),
        premeasure: Vec::new(),
        lost: Vec::new(),
    };
    gadget_gate(&g)
}

/// Two hubs joined by an edge, each carrying `l` leaves. Vertex 0 and 1 are
/// the hubs, then the leaves of hub 0, then those of hub 1.
pub fn double_star(l: usize) -> GraphRegister {
    let mut edges = vec![(0, 1)];
    for i in 0..l {
        edges.push((0, 2 + i));
        edges.push((1, 2 + l + i));
    }
    GraphRegister::from_edges(2 + 2 * l, &edges).expect("star edges are distinct")
}

/// Two columns of `l` fully joined, on the leaf ids of [`double_star`] with
/// the hub ids dead.
pub fn crazy_block(l: usize) -> Result<GraphRegister> {
    let mut edges = Vec::new();
    for i in 0..l {
        for j in 0..l {
            edges.push((2 + i, 2 + l + j));
        }
    }
    let mut reg = GraphRegister::from_edges(2 + 2 * l, &edges)?;
    reg.remove_lost(0)?;
    reg.remove_lost(1)?;
    Ok(reg)
}

/// Measures both hubs of [`double_star`] in X and checks the rest is
/// LC-equivalent to the two-column crazy block.
pub fn verify_star_reduction(l: usize) -> Result<bool> {
    if l == 0 {
        return Err(Error::Spec("need at least one leaf per hub".into()));
    }
    let mut rng = trial_rng(ORACLE_SEED, l as u64);
    let mut reg = double_star(l);
    reg.measure_pauli(0, Basis::X, &mut rng)?;
    reg.measure_pauli(1, Basis::X, &mut rng)?;
    lc_equivalent(&reg, &crazy_block(l)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_gadget_widths() {
        for l in 1..=3 {
            assert_eq!(gadget_gate(&s_gadget(l).unwrap()).unwrap(), Some(LogicalGate::Phase), "l={l}");
        }
        assert!(matches!(verify_s_gadget(4), Err(Error::Capacity(_))));
    }

    #[test]
    fn wire_parity() {
        for (l, n) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
            let want = if n % 2 == 1 { LogicalGate::Hadamard } else { LogicalGate::Identity };
            assert_eq!(wire_gate(l, n).unwrap(), Some(want), "l={l} n={n}");
        }
    }

    #[test]
    fn lost_central_qubit_rejects() {
        let mut g = s_gadget(2).unwrap();
        g.mark_lost(2);
        assert!(g.prepare(&mut trial_rng(1, 0)).is_err());
        assert!(gadget_gate(&g).is_err());
    }

    #[test]
    fn double_star_to_block() {
        for l in 2..=4 {
            assert!(verify_star_reduction(l).unwrap(), "l={l}");
            assert!(!lc_equivalent(&double_star(l), &crazy_block(l).unwrap()).unwrap());
        }
    }
}
