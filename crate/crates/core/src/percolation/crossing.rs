use serde::Serialize;

use crate::builder::{Axis, BuiltLattice};

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = self.parent[x] as usize;
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// Graph whose vertices sit on a box of integer coordinates.
pub trait SpatialGraph {
    fn vertex_count(&self) -> usize;
    fn is_present(&self, v: usize) -> bool;
    fn neighbors(&self, v: usize) -> &[u32];
    fn position(&self, v: usize) -> [usize; 3];
    /// Size of the coordinate box along each axis.
    fn extent(&self) -> [usize; 3];
}

impl SpatialGraph for BuiltLattice {
    fn vertex_count(&self) -> usize {
        self.register.vertex_count()
    }

    fn is_present(&self, v: usize) -> bool {
        self.register.is_alive(v)
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        self.register.neighbors(v)
    }

    fn position(&self, v: usize) -> [usize; 3] {
        self.coords(v)
    }

    fn extent(&self) -> [usize; 3] {
        self.dims
    }
}

/// Plain adjacency with coordinates, used for reference lattices.
#[derive(Clone, Debug, Default)]
pub struct LatticeGraph {
    pub adj: Vec<Vec<u32>>,
    pub pos: Vec<[usize; 3]>,
    pub present: Vec<bool>,
    pub extent: [usize; 3],
}

impl LatticeGraph {
    pub fn with_vertices(pos: Vec<[usize; 3]>, extent: [usize; 3]) -> Self {
        let n = pos.len();
        LatticeGraph { adj: vec![Vec::new(); n], pos, present: vec![true; n], extent }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a].push(b as u32);
        self.adj[b].push(a as u32);
    }
}

impl SpatialGraph for LatticeGraph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn is_present(&self, v: usize) -> bool {
        self.present[v]
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    fn position(&self, v: usize) -> [usize; 3] {
        self.pos[v]
    }

    fn extent(&self) -> [usize; 3] {
        self.extent
    }
}

/// Union-find over present vertices.
pub fn components<G: SpatialGraph + ?Sized>(g: &G) -> UnionFind {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for v in 0..n {
        if !g.is_present(v) {
            continue;
        }
        for &u in g.neighbors(v) {
            let u = u as usize;
            if u > v && g.is_present(u) {
                uf.union(u, v);
            }
        }
    }
    uf
}

fn crossing_with<G: SpatialGraph + ?Sized>(g: &G, uf: &mut UnionFind, axis: Axis) -> bool {
    let k = axis.index();
    let last = g.extent()[k].saturating_sub(1);
    let n = g.vertex_count();
    let mut low = vec![false; n];
    for v in 0..n {
        if g.is_present(v) && g.position(v)[k] == 0 {
            let r = uf.find(v);
            low[r] = true;
        }
    }
    (0..n).any(|v| g.is_present(v) && g.position(v)[k] == last && {
        let r = uf.find(v);
        low[r]
    })
}

/// True iff one connected component touches both end slabs along `axis`.
pub fn crossing_exists<G: SpatialGraph + ?Sized>(g: &G, axis: Axis) -> bool {
    let mut uf = components(g);
    crossing_with(g, &mut uf, axis)
}

/// Size of the largest component over the number of present vertices.
pub fn largest_component_fraction<G: SpatialGraph + ?Sized>(g: &G) -> f64 {
    let mut uf = components(g);
    largest_with(g, &mut uf)
}

fn largest_with<G: SpatialGraph + ?Sized>(g: &G, uf: &mut UnionFind) -> f64 {
    let mut present = 0usize;
    let mut best = 0usize;
    for v in 0..g.vertex_count() {
        if g.is_present(v) {
            present += 1;
            best = best.max(uf.set_size(v));
        }
    }
    if present == 0 {
        0.0
    } else {
        best as f64 / present as f64
    }
}

/// Connectivity summary of one sampled lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Connectivity {
    /// Crossing along x, y, z.
    pub crossing: [bool; 3],
    pub largest_component_fraction: f64,
}

pub fn connectivity<G: SpatialGraph + ?Sized>(g: &G) -> Connectivity {
    let mut uf = components(g);
    let crossing = Axis::ALL.map(|a| crossing_with(g, &mut uf, a));
    Connectivity { crossing, largest_component_fraction: largest_with(g, &mut uf) }
}

/// Estimated probability with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p: f64,
    /// `sqrt(p (1 - p) / trials)`.
    pub std_error: f64,
}

impl ProbabilityEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_error = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        ProbabilityEstimate { successes, trials, p, std_error }
    }

    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }
}

/// Aggregate over trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PercolationReport {
    pub largest_component_fraction: f64,
    pub crossing: [bool; 3],
    pub spanning: ProbabilityEstimate,
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
