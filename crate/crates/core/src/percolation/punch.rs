use rand::Rng;
use serde::Serialize;

use crate::builder::BuiltLattice;
use crate::graph_state::GraphRegister;
use crate::Result;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PunchOut {
    /// Vertices with a possible Z error, measured in Z themselves.
    pub cleared: Vec<usize>,
    /// Neighbours measured in Z, in order.
    pub measured: Vec<usize>,
    /// Lost vertices removed from the register.
    pub removed: Vec<usize>,
}

/// Cuts each lost vertex out of the cluster: its alive neighbours are
/// measured in Z, then the vertex itself is dropped.
pub fn punch_out(reg: &mut GraphRegister, lost: &[usize], rng: &mut impl Rng) -> Result<PunchOut> {
    let mut out = PunchOut::default();
    for &v in lost {
        if !reg.is_alive(v) {
            continue;
        }
        let ns: Vec<usize> = reg.neighbors(v).iter().map(|&u| u as usize).collect();
        for u in ns {
            reg.measure_graph_z(u, rng)?;
            out.measured.push(u);
        }
        reg.remove_lost(v)?;
        out.removed.push(v);
    }
    Ok(out)
}

/// Loss recovery on a built wafer. A damaged vertex carries a possible Z
/// error left by a lost photon elsewhere; measuring it in Z removes the
/// error along with the vertex. Lost computational photons are then
/// punched out.
pub fn recover_losses(lattice: &mut BuiltLattice, rng: &mut impl Rng) -> Result<PunchOut> {
    let reg = &mut lattice.register;
    let lost: Vec<usize> = lattice.lost.iter().copied().filter(|&v| reg.is_alive(v)).collect();
    let damaged: Vec<usize> =
        lattice.damaged.iter().copied().filter(|&v| reg.is_alive(v) && !lost.contains(&v)).collect();
    for &v in &damaged {
        reg.measure_graph_z(v, rng)?;
    }
    let mut out = punch_out(reg, &lost, rng)?;
    out.cleared = damaged;
    Ok(out)
}
