use rand::Rng;
use serde::Serialize;

use super::cellspec::{Axis, SourceShape, UnitCellSpec, WaferSpec};
use crate::fusion::{fuse, FusionKind, FusionResult};
use crate::graph_state::GraphRegister;
use crate::{Error, Result};

/// Appends a three-photon linear cluster and returns its vertex ids.
pub fn make_ghz3(reg: &mut GraphRegister) -> [usize; 3] {
    let r = reg.add_vertices(3);
    let ids = [r.start, r.start + 1, r.start + 2];
    reg.apply_cz(ids[0], ids[1]).expect("fresh vertices");
    reg.apply_cz(ids[1], ids[2]).expect("fresh vertices");
    ids
}

/// Keeps `v` with probability `fidelity` (it is then treated as ideal),
/// otherwise measures it out in the graph Z basis.
pub fn apply_plus_filter(reg: &mut GraphRegister, v: usize, fidelity: f64, rng: &mut impl Rng) -> Result<bool> {
    if !reg.is_alive(v) {
        return Err(Error::VertexState { vertex: v, reason: "cannot filter a dead vertex" });
    }
    let keep = rng.random_bool(fidelity.clamp(0.0, 1.0));
    if !keep {
        reg.measure_graph_z(v, rng)?;
    }
    Ok(keep)
}

/// Possible Z errors left by lost photons. Each loss is one unknown bit;
/// a vertex's error is the XOR of the bits in its set.
struct ZErrors {
    sets: Vec<Vec<u32>>,
    events: u32,
}

impl ZErrors {
    fn new(n: usize) -> Self {
        ZErrors { sets: vec![Vec::new(); n], events: 0 }
    }

    fn fresh(&mut self) -> u32 {
        self.events += 1;
        self.events
    }

    fn toggle(&mut self, v: usize, bits: &[u32]) {
        let set = &mut self.sets[v];
        for &e in bits {
            match set.binary_search(&e) {
                Ok(i) => {
                    set.remove(i);
                }
                Err(i) => set.insert(i, e),
            }
        }
    }

    /// Tracing out `v` leaves an unknown Z on each neighbour.
    fn lose(&mut self, reg: &GraphRegister, v: usize) {
        let e = self.fresh();
        for &u in reg.neighbors(v) {
            self.toggle(u as usize, &[e]);
        }
        self.sets[v].clear();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FusionRecord {
    pub a: u32,
    pub b: u32,
    pub result: FusionResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub photons_emitted: u64,
    pub ancilla_photons: u64,
    pub fusions_attempted: u64,
    pub computational_qubits: u64,
    pub surviving_computational: u64,
    pub photons_per_surviving_qubit: f64,
}

/// The wafer after all fusions, filtering and loss sampling.
#[derive(Clone, Debug)]
pub struct BuiltLattice {
    pub register: GraphRegister,
    pub dims: [usize; 3],
    pub slots: usize,
    pub computational_slots: [usize; 2],
    /// Computational vertices whose photon was lost. They are still alive
    /// in the register; callers decide how to treat them.
    pub lost: Vec<usize>,
    /// Alive vertices that may carry a Z error from a lost photon.
    pub damaged: Vec<usize>,
    pub fusion_log: Vec<FusionRecord>,
    pub resources: ResourceReport,
}

impl BuiltLattice {
    pub fn cell_index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.dims[1] + y) * self.dims[0] + x
    }

    pub fn vertex(&self, cell: [usize; 3], slot: usize) -> usize {
        self.cell_index(cell[0], cell[1], cell[2]) * self.slots + slot
    }

    /// Cell coordinates of any vertex.
    pub fn coords(&self, v: usize) -> [usize; 3] {
        let c = v / self.slots;
        let x = c % self.dims[0];
        let y = (c / self.dims[0]) % self.dims[1];
        let z = c / (self.dims[0] * self.dims[1]);
        [x, y, z]
    }

    /// `(primal, dual)` vertex ids of a cell.
    pub fn computational(&self, x: usize, y: usize, z: usize) -> (usize, usize) {
        let base = self.cell_index(x, y, z) * self.slots;
        (base + self.computational_slots[0], base + self.computational_slots[1])
    }

    pub fn is_computational(&self, v: usize) -> bool {
        self.computational_slots.contains(&(v % self.slots))
    }

    /// CSV side table `x,y,z,primal_id,dual_id`, one row per cell.
    pub fn side_table_csv(&self) -> String {
        let mut out = String::from("x,y,z,primal_id,dual_id\n");
        for z in 0..self.dims[2] {
            for y in 0..self.dims[1] {
                for x in 0..self.dims[0] {
                    let (p, d) = self.computational(x, y, z);
                    out.push_str(&format!("{x},{y},{z},{p},{d}\n"));
                }
            }
        }
        out
    }

    /// Fraction of fusion attempts that succeeded.
    pub fn bond_retention(&self) -> f64 {
        if self.fusion_log.is_empty() {
            return 0.0;
        }
        let ok = self.fusion_log.iter().filter(|r| r.result == FusionResult::Success).count();
        ok as f64 / self.fusion_log.len() as f64
    }
}

/// Builds the wafer layer by layer.
///
/// Each layer first fuses its intra-cell pairs, then its x and y boundary
/// pairs, then the layer pairs joining it to the previous layer. Boundary
/// photons with no partner at the wafer edge are measured out, and the
/// filter runs on the surviving computational photons at the end.
pub fn build_wafer(spec: &WaferSpec, cell: &UnitCellSpec, rng: &mut impl Rng) -> Result<BuiltLattice> {
    spec.validate()?;
    cell.validate()?;
    let [nx, ny, nz] = [spec.nx, spec.ny, spec.nz];
    let slots = cell.slot_count();
    let cells = spec.cells();
    let n = cells * slots;
    if n > u32::MAX as usize {
        return Err(Error::Capacity(format!("{n} photons exceed the 32-bit vertex id space")));
    }
    let mut edges = Vec::with_capacity(cells * cell.sources * 2);
    for c in 0..cells {
        for s in 0..cell.sources {
            let v = c * slots + 3 * s;
            edges.push((v, v + 1));
            edges.push((v + 1, v + 2));
        }
    }
    let mut reg = GraphRegister::from_edges(n, &edges)?;
    drop(edges);
    for s in 0..cell.sources {
        if cell.shape(s) == SourceShape::Triangle {
            for c in 0..cells {
                reg.local_complement(c * slots + 3 * s + 1)?;
            }
        }
    }
    let lost: Vec<bool> = if spec.photon_loss > 0.0 {
        (0..n).map(|_| rng.random_bool(spec.photon_loss)).collect()
    } else {
        vec![false; n]
    };

    let cell_index = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut log = Vec::with_capacity(cells * cell.fusions_per_cell());
    let mut ancillas = 0u64;
    let mut errors = ZErrors::new(n);
    let mut attempt = |reg: &mut GraphRegister, errors: &mut ZErrors, a: usize, b: usize, rng: &mut _| -> Result<()> {
        let result = if lost[a] || lost[b] {
            // the photon that did arrive is still detected
            for v in [a, b] {
                if lost[v] {
                    errors.lose(reg, v);
                    reg.remove_lost(v)?;
                } else {
                    reg.measure_graph_z(v, rng)?;
                    errors.sets[v].clear();
                }
            }
            FusionResult::LossHerald
        } else {
            let na: Vec<usize> = reg.neighbors(a).iter().map(|&v| v as usize).filter(|&v| v != b).collect();
            let nb: Vec<usize> = reg.neighbors(b).iter().map(|&v| v as usize).filter(|&v| v != a).collect();
            let adjacent = reg.has_edge(a, b);
            let ea = std::mem::take(&mut errors.sets[a]);
            let eb = std::mem::take(&mut errors.sets[b]);
            let result = fuse(reg, a, b, &spec.fusion, rng)?.result;
            match result {
                FusionResult::Success if spec.fusion.kind == FusionKind::TypeI => {
                    errors.sets[a] = ea;
                    errors.toggle(a, &eb);
                }
                FusionResult::Success => {
                    // a Z on a flips the X_a Z_b sign, whose byproduct lands on N(b)
                    nb.iter().for_each(|&w| errors.toggle(w, &ea));
                    na.iter().for_each(|&u| errors.toggle(u, &eb));
                    if adjacent {
                        let e = errors.fresh();
                        na.iter().chain(&nb).for_each(|&v| errors.toggle(v, &[e]));
                    }
                }
                FusionResult::LossHerald => {
                    for ns in [&na, &nb] {
                        let e = errors.fresh();
                        ns.iter().for_each(|&v| errors.toggle(v, &[e]));
                    }
                }
                FusionResult::Failure => {}
            }
            result
        };
        ancillas += spec.fusion.ancilla_cost as u64;
        log.push(FusionRecord { a: a as u32, b: b as u32, result });
        Ok(())
    };

    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let base = cell_index(x, y, z) * slots;
                for &(a, b) in &cell.intra {
                    attempt(&mut reg, &mut errors, base + a, base + b, rng)?;
                }
            }
        }
        for y in 0..ny {
            for x in 0..nx {
                let base = cell_index(x, y, z) * slots;
                for p in &cell.boundary {
                    let next = match p.axis {
                        Axis::X if x + 1 < nx => Some(cell_index(x + 1, y, z)),
                        Axis::Y if y + 1 < ny => Some(cell_index(x, y + 1, z)),
                        _ => None,
                    };
                    if let Some(nc) = next {
                        attempt(&mut reg, &mut errors, base + p.from, nc * slots + p.to, rng)?;
                    }
                }
            }
        }
        if z > 0 {
            for y in 0..ny {
                for x in 0..nx {
                    let prev = cell_index(x, y, z - 1) * slots;
                    let here = cell_index(x, y, z) * slots;
                    for &(a, b) in &cell.layer {
                        attempt(&mut reg, &mut errors, prev + a, here + b, rng)?;
                    }
                }
            }
        }
    }
    drop(attempt);

    // unpaired photons at the wafer edge
    let comp = cell.computational_slots();
    for v in 0..n {
        if reg.is_alive(v) && !comp.contains(&(v % slots)) {
            if lost[v] {
                errors.lose(&reg, v);
                reg.remove_lost(v)?;
            } else {
                reg.measure_graph_z(v, rng)?;
                errors.sets[v].clear();
            }
        }
    }

    let mut lost_comp = Vec::new();
    for c in 0..cells {
        for &s in &comp {
            let v = c * slots + s;
            if lost[v] {
                lost_comp.push(v);
            } else if spec.filter.enabled && !apply_plus_filter(&mut reg, v, spec.filter.fidelity, rng)? {
                errors.sets[v].clear();
            }
        }
    }

    let damaged: Vec<usize> = (0..n).filter(|&v| reg.is_alive(v) && !errors.sets[v].is_empty()).collect();
    let emitted = (cells * slots) as u64 + ancillas;
    let comps = (cells * 2) as u64;
    let surviving = (0..cells)
        .flat_map(|c| comp.map(|s| c * slots + s))
        .filter(|&v| reg.is_alive(v) && !lost[v])
        .count() as u64;
    let resources = ResourceReport {
        photons_emitted: emitted,
        ancilla_photons: ancillas,
        fusions_attempted: log.len() as u64,
        computational_qubits: comps,
        surviving_computational: surviving,
        photons_per_surviving_qubit: if surviving == 0 { f64::INFINITY } else { emitted as f64 / surviving as f64 },
    };
    Ok(BuiltLattice {
        register: reg,
        dims: [nx, ny, nz],
        slots,
        computational_slots: comp,
        lost: lost_comp,
        damaged,
        fusion_log: log,
        resources,
    })
}
