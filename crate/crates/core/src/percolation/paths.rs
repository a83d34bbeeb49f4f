use std::collections::VecDeque;

use serde::Serialize;

use super::crossing::SpatialGraph;
use crate::{Error, Result};

pub const DEFAULT_WINDOW: usize = 15;

/// Routing progress of the logical wires.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PathfindingState {
    pub window: usize,
    /// Committed vertices of each wire, oldest first.
    pub paths: Vec<Vec<usize>>,
    /// Every layer below this one is finished for all wires.
    pub frontier: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathOutcome {
    /// Layers reached by every wire before the first one got stuck.
    pub sustained_layers: usize,
    pub state: PathfindingState,
}

/// Reusable breadth-first search scratch space.
struct Search {
    stamp: Vec<u32>,
    parent: Vec<u32>,
    dist: Vec<u32>,
    gen: u32,
    queue: VecDeque<usize>,
}

const ROOT: u32 = u32::MAX;

impl Search {
    fn new(n: usize) -> Self {
        Search { stamp: vec![0; n], parent: vec![ROOT; n], dist: vec![0; n], gen: 0, queue: VecDeque::new() }
    }

    /// Deepest vertex reachable from `sources` through unused present
    /// vertices with layer in `[lo, hi]`; ties go to the shorter path, then
    /// the lower id.
    fn deepest<G: SpatialGraph + ?Sized>(
        &mut self,
        g: &G,
        used: &[bool],
        sources: &[usize],
        lo: usize,
        hi: usize,
    ) -> Option<usize> {
        self.gen += 1;
        let gen = self.gen;
        self.queue.clear();
        for &s in sources {
            if self.stamp[s] != gen {
                self.stamp[s] = gen;
                self.parent[s] = ROOT;
                self.dist[s] = 0;
                self.queue.push_back(s);
            }
        }
        let layer = |v: usize| g.position(v)[2];
        let mut best: Option<usize> = None;
        let better = |v: usize, b: usize, dist: &[u32]| {
            (layer(v), std::cmp::Reverse(dist[v]), std::cmp::Reverse(v))
                > (layer(b), std::cmp::Reverse(dist[b]), std::cmp::Reverse(b))
        };
        while let Some(v) = self.queue.pop_front() {
            if best.is_none_or(|b| better(v, b, &self.dist)) {
                best = Some(v);
            }
            for &u in g.neighbors(v) {
                let u = u as usize;
                if self.stamp[u] == gen || used[u] || !g.is_present(u) {
                    continue;
                }
                let z = layer(u);
                if z < lo || z > hi {
                    continue;
                }
                self.stamp[u] = gen;
                self.parent[u] = v as u32;
                self.dist[u] = self.dist[v] + 1;
                self.queue.push_back(u);
            }
        }
        best
    }

    fn path_to(&self, target: usize) -> Vec<usize> {
        let mut p = vec![target];
        let mut v = target;
        while self.parent[v] != ROOT {
            v = self.parent[v] as usize;
            p.push(v);
        }
        p.reverse();
        p
    }
}

/// Routes `wires` vertex-disjoint wires up the z axis one layer at a time.
///
/// At layer `t` each wire looks at layers `t - window..=t + window` only, picks the
/// deepest vertex it can reach there by the shortest path, and commits that
/// path up to its first step past layer `t`. Wires start from layer 0 and
/// move in index order. Ties go to the lowest vertex id.
pub fn find_paths_windowed<G: SpatialGraph + ?Sized>(g: &G, wires: usize, window: usize) -> Result<PathOutcome> {
    if window == 0 || wires == 0 {
        return Err(Error::Config(format!("need window >= 1 and wires >= 1, got {window} and {wires}")));
    }
    let nz = g.extent()[2];
    let n = g.vertex_count();
    let layer = |v: usize| g.position(v)[2];
    let mut used = vec![false; n];
    let mut search = Search::new(n);
    let mut state = PathfindingState { window, paths: vec![Vec::new(); wires], frontier: 0 };
    let outcome = |state: PathfindingState, sustained| PathOutcome { sustained_layers: sustained, state };
    if nz == 0 {
        return Ok(outcome(state, 0));
    }

    let bottom: Vec<usize> = (0..n).filter(|&v| g.is_present(v) && layer(v) == 0).collect();
    for t in 0..nz {
        state.frontier = t;
        for w in 0..wires {
            let head = state.paths[w].last().copied();
            if head.is_some_and(|h| layer(h) > t) {
                continue;
            }
            let sources: Vec<usize> = match head {
                Some(h) => vec![h],
                None => bottom.iter().copied().filter(|&v| !used[v]).collect(),
            };
            if sources.is_empty() {
                return Ok(outcome(state, t));
            }
            if t + 1 == nz {
                if head.is_none() {
                    used[sources[0]] = true;
                    state.paths[w].push(sources[0]);
                }
                continue;
            }
            let lo = t.saturating_sub(window);
            let hi = t.saturating_add(window).min(nz - 1);
            let target = match search.deepest(g, &used, &sources, lo, hi) {
                Some(v) if layer(v) > t => v,
                _ => {
                    if head.is_none() {
                        state.paths[w].push(sources[0]);
                    }
                    return Ok(outcome(state, t + 1));
                }
            };
            let path = search.path_to(target);
            let k = path.iter().rposition(|&v| layer(v) <= t).expect("path starts at or below t");
            let start = usize::from(head.is_some());
            for &v in &path[start..=k + 1] {
                used[v] = true;
                state.paths[w].push(v);
            }
        }
    }
    state.frontier = nz;
    Ok(outcome(state, nz))
}
