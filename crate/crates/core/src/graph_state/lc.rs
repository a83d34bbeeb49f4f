//! Local-complementation orbit search.

use std::collections::{HashSet, VecDeque};

use super::register::GraphRegister;
use crate::{Error, Result};

pub const MAX_LC_VERTICES: usize = 20;
const MAX_ORBIT_STATES: usize = 1 << 20;

fn rows(reg: &GraphRegister, ids: &[usize]) -> Vec<u32> {
    let pos = |v: usize| ids.binary_search(&v).ok();
    ids.iter()
        .map(|&v| reg.neighbors(v).iter().filter_map(|&u| pos(u as usize)).fold(0u32, |m, i| m | 1 << i))
        .collect()
}

fn complement(g: &[u32], a: usize) -> Vec<u32> {
    let na = g[a];
    let mut out = g.to_vec();
    let mut m = na;
    while m != 0 {
        let u = m.trailing_zeros() as usize;
        m &= m - 1;
        out[u] ^= na & !(1 << u);
    }
    out
}

/// Whether `g2` is reachable from `g1` by local complementations, on the
/// alive vertices of each. Registers with different alive sets are never
/// equivalent.
pub fn lc_equivalent(g1: &GraphRegister, g2: &GraphRegister) -> Result<bool> {
    let ids: Vec<usize> = g1.alive_vertices().collect();
    let ids2: Vec<usize> = g2.alive_vertices().collect();
    if ids.len() > MAX_LC_VERTICES || ids2.len() > MAX_LC_VERTICES {
        return Err(Error::Capacity(format!("equivalence search limited to {MAX_LC_VERTICES} alive vertices")));
    }
    if ids != ids2 {
        return Ok(false);
    }
    let start = rows(g1, &ids);
    let target = rows(g2, &ids);
    if start == target {
        return Ok(true);
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for a in 0..ids.len() {
            if g[a] & (g[a] - 1) == 0 {
                // degree 0 or 1: complementing changes nothing
                continue;
            }
            let h = complement(&g, a);
            if h == target {
                return Ok(true);
            }
            if seen.insert(h.clone()) {
                if seen.len() > MAX_ORBIT_STATES {
                    return Err(Error::Capacity(format!("orbit exceeded {MAX_ORBIT_STATES} graphs")));
                }
                queue.push_back(h);
            }
        }
    }
    Ok(false)
}
