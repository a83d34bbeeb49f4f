use rand::Rng;

use super::clifford::{Clifford, LcStep};
use super::pauli::{Pauli, PauliString};
use crate::{Error, Result};

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// Eigenvalue observed, +1 or -1.
    pub outcome: i8,
    pub deterministic: bool,
}

enum Choice<'a, R: Rng> {
    Random(&'a mut R),
    Forced(i8),
}

/// Graph state with a local Clifford and a Pauli byproduct on every vertex.
///
/// The represented state is `prod_v vop_v * prod_v frame_v |G>` where `|G>`
/// is the graph state of the adjacency. Neighbour lists stay sorted.
/// Measured or lost vertices keep their ids, have no edges and are marked
/// dead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphRegister {
    adj: Vec<Vec<u32>>,
    vop: Vec<Clifford>,
    frame: Vec<Pauli>,
    frame_known: Vec<bool>,
    alive: Vec<bool>,
}

impl GraphRegister {
    /// `n` vertices in `|+>`, no edges.
    pub fn new(n: usize) -> Self {
        let mut r = GraphRegister::default();
        r.add_vertices(n);
        r
    }

    /// Pure graph state with the given edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut r = GraphRegister::new(n);
        for &(a, b) in edges {
            r.check(a)?;
            r.check(b)?;
            if a == b {
                return Err(Error::VertexState { vertex: a, reason: "self loop" });
            }
            r.toggle_edge(a, b);
        }
        Ok(r)
    }

    pub fn add_vertices(&mut self, k: usize) -> std::ops::Range<usize> {
        let start = self.adj.len();
        let end = start + k;
        self.adj.resize_with(end, Vec::new);
        self.vop.resize(end, Clifford::IDENTITY);
        self.frame.resize(end, Pauli::I);
        self.frame_known.resize(end, true);
        self.alive.resize(end, true);
        start..end
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.adj.len()).filter(move |&v| self.alive[v])
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().map(move |&v| (u, v as usize)).filter(|(u, v)| u < v))
    }

    pub fn vop(&self, v: usize) -> Clifford {
        self.vop[v]
    }

    /// Recorded byproduct, or `None` once an erasure touched the vertex.
    pub fn frame(&self, v: usize) -> Option<Pauli> {
        self.frame_known[v].then_some(self.frame[v])
    }

    pub(crate) fn check(&self, v: usize) -> Result<()> {
        if v >= self.adj.len() {
            Err(Error::out_of_range(v))
        } else if !self.alive[v] {
            Err(Error::dead(v))
        } else {
            Ok(())
        }
    }

    pub(crate) fn toggle_edge(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        match self.adj[a].binary_search(&(b as u32)) {
            Ok(i) => {
                self.adj[a].remove(i);
                let j = self.adj[b].binary_search(&(a as u32)).expect("symmetric adjacency");
                self.adj[b].remove(j);
            }
            Err(i) => {
                self.adj[a].insert(i, b as u32);
                let j = self.adj[b].binary_search(&(a as u32)).unwrap_err();
                self.adj[b].insert(j, a as u32);
            }
        }
    }

    /// Drop every edge of `v` and mark it dead, with no state bookkeeping.
    pub(crate) fn detach(&mut self, v: usize) {
        let ns = std::mem::take(&mut self.adj[v]);
        for u in ns {
            let row = &mut self.adj[u as usize];
            let j = row.binary_search(&(v as u32)).expect("symmetric adjacency");
            row.remove(j);
        }
        self.alive[v] = false;
    }

    /// Detach `v` and record it as the single-qubit state `vop |+>`.
    pub(crate) fn retire(&mut self, v: usize, vop: Clifford) {
        self.detach(v);
        self.vop[v] = vop;
        self.frame[v] = Pauli::I;
        self.frame_known[v] = true;
    }

    pub(crate) fn push_frame(&mut self, v: usize, p: Pauli) {
        self.frame[v] = self.frame[v].times(p);
    }

    pub(crate) fn forget_frame(&mut self, v: usize) {
        self.frame_known[v] = false;
    }

    /// Apply a local Clifford to vertex `v`.
    pub fn apply_clifford(&mut self, v: usize, c: Clifford) -> Result<()> {
        self.check(v)?;
        self.vop[v] = c.then_after(self.vop[v]);
        Ok(())
    }

    fn absorb_frame(&mut self, v: usize) {
        self.vop[v] = self.vop[v].then_after(Clifford::pauli(self.frame[v]));
        self.frame[v] = Pauli::I;
    }

    fn lc_raw(&mut self, a: usize) {
        let ns = self.adj[a].clone();
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                self.toggle_edge(ns[i] as usize, ns[j] as usize);
            }
        }
        let sa = Clifford::sqrt_minus_ix();
        self.vop[a] = self.vop[a].then_after(sa.inverse());
        self.frame[a] = sa.conjugate(self.frame[a]).0;
        let sb = Clifford::sqrt_iz();
        for b in ns {
            let b = b as usize;
            self.vop[b] = self.vop[b].then_after(sb.inverse());
            self.frame[b] = sb.conjugate(self.frame[b]).0;
        }
    }

    /// Local complementation at `a`; the physical state is unchanged.
    pub fn local_complement(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        self.lc_raw(a);
        Ok(())
    }

    fn has_other_neighbor(&self, a: usize, b: usize) -> bool {
        self.adj[a].iter().any(|&u| u as usize != b)
    }

    fn reduce_vop(&mut self, a: usize, avoid: usize) {
        for step in self.vop[a].reduction_word() {
            match step {
                LcStep::LcSelf => self.lc_raw(a),
                LcStep::LcNeighbor => {
                    let c = self.adj[a].iter().map(|&u| u as usize).find(|&u| u != avoid).expect("neighbour besides partner");
                    self.lc_raw(c);
                }
            }
        }
        debug_assert_eq!(self.vop[a], Clifford::IDENTITY);
    }

    /// Controlled-Z between `a` and `b`.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::VertexState { vertex: a, reason: "controlled-Z needs two distinct vertices" });
        }
        self.absorb_frame(a);
        self.absorb_frame(b);
        if self.has_other_neighbor(a, b) {
            self.reduce_vop(a, b);
        }
        if self.has_other_neighbor(b, a) {
            self.reduce_vop(b, a);
        }
        if self.has_other_neighbor(a, b) && !self.vop[a].is_diagonal() {
            self.reduce_vop(a, b);
        }
        let edge = self.has_edge(a, b);
        let (e, va, vb) = Clifford::cz_lookup(edge, self.vop[a], self.vop[b]);
        if e != edge {
            self.toggle_edge(a, b);
        }
        self.vop[a] = va;
        self.vop[b] = vb;
        Ok(())
    }

    /// Measure `basis` on `a`. The vertex dies; byproducts land in the
    /// frames of its former neighbours.
    pub fn measure_pauli(&mut self, a: usize, basis: Basis, rng: &mut impl Rng) -> Result<Measurement> {
        self.check(a)?;
        self.measure_impl(a, basis, Choice::Random(rng))
    }

    /// As [`measure_pauli`](Self::measure_pauli) but post-selecting the
    /// outcome; fails if that outcome has probability zero.
    pub fn measure_pauli_forced(&mut self, a: usize, basis: Basis, outcome: i8) -> Result<Measurement> {
        self.check(a)?;
        let snapshot = self.clone();
        let r = self.measure_impl::<crate::rng::TrialRng>(a, basis, Choice::Forced(outcome));
        if r.is_err() {
            *self = snapshot;
        }
        r
    }

    fn measure_impl<R: Rng>(&mut self, a: usize, basis: Basis, mut choice: Choice<'_, R>) -> Result<Measurement> {
        loop {
            let eff = self.vop[a].then_after(Clifford::pauli(self.frame[a]));
            let (q, negative) = eff.inverse().conjugate(basis.pauli());
            match q {
                Pauli::Z => return Ok(self.z_rule(a, negative, &mut choice)),
                Pauli::Y => self.lc_raw(a),
                Pauli::X => {
                    if let Some(&b) = self.adj[a].first() {
                        self.lc_raw(b as usize);
                    } else {
                        let outcome = if negative { -1 } else { 1 };
                        if let Choice::Forced(f) = choice {
                            if f != outcome {
                                return Err(Error::Numeric(format!("forced outcome {f} impossible on vertex {a}")));
                            }
                        }
                        self.alive[a] = false;
                        return Ok(Measurement { outcome, deterministic: true });
                    }
                }
                Pauli::I => unreachable!("conjugate of a Pauli is a Pauli"),
            }
        }
    }

    fn z_rule<R: Rng>(&mut self, a: usize, negative: bool, choice: &mut Choice<'_, R>) -> Measurement {
        let sign = if negative { -1 } else { 1 };
        let m = match choice {
            Choice::Random(rng) => rng.random::<bool>(),
            Choice::Forced(o) => *o != sign,
        };
        let outcome = if m { -sign } else { sign };
        let ns = std::mem::take(&mut self.adj[a]);
        for &b in &ns {
            let b = b as usize;
            let row = &mut self.adj[b];
            let j = row.binary_search(&(a as u32)).expect("symmetric adjacency");
            row.remove(j);
            if m {
                self.push_frame(b, Pauli::Z);
            }
        }
        let mut post = Clifford::h();
        if m {
            post = post.then_after(Clifford::z());
        }
        self.absorb_frame(a);
        self.vop[a] = self.vop[a].then_after(post);
        self.alive[a] = false;
        Measurement { outcome, deterministic: false }
    }

    /// Z measurement in the graph basis, ignoring `a`'s local Clifford.
    /// This is what a fusion failure or a filter rejection does to the
    /// lattice.
    pub fn measure_graph_z(&mut self, a: usize, rng: &mut impl Rng) -> Result<Measurement> {
        self.check(a)?;
        self.vop[a] = Clifford::IDENTITY;
        self.frame[a] = Pauli::I;
        Ok(self.z_rule(a, false, &mut Choice::Random(rng)))
    }

    /// Erase a lost photon: same graph effect as a Z measurement whose
    /// outcome nobody saw, so neighbouring frames become unknown.
    pub fn remove_lost(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        for i in 0..self.adj[a].len() {
            let b = self.adj[a][i] as usize;
            self.frame_known[b] = false;
        }
        self.detach(a);
        self.frame_known[a] = false;
        Ok(())
    }

    /// Signed stabilizer generators, one per vertex, for registers of at
    /// most 32 vertices with every frame known.
    pub fn stabilizer_generators(&self) -> Result<Vec<PauliString>> {
        let n = self.vertex_count();
        if n > 32 {
            return Err(Error::Capacity(format!("stabilizer export holds at most 32 vertices, register has {n}")));
        }
        if self.frame_known.iter().any(|k| !k) {
            return Err(Error::Spec("register contains erased vertices; its state is mixed".into()));
        }
        let mut gens = Vec::with_capacity(n);
        for v in 0..n {
            let mut terms = vec![(v, Pauli::X)];
            terms.extend(self.adj[v].iter().map(|&u| (u as usize, Pauli::Z)));
            let mut negative = false;
            let mut out = Vec::with_capacity(terms.len());
            for (q, p) in terms {
                if !self.frame[q].commutes_with(p) {
                    negative = !negative;
                }
                let (img, neg) = self.vop[q].conjugate(p);
                negative ^= neg;
                out.push((q, img));
            }
            gens.push(PauliString::from_paulis(&out, negative));
        }
        Ok(gens)
    }
}
