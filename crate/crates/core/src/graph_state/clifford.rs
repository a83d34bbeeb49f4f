//! The 24 single-qubit Clifford operators, modulo global phase.
//!
//! Elements are found by closing {H, S} over 2x2 complex matrices once at
//! first use. All tables (products, inverses, Pauli conjugation, and the
//! two-qubit controlled-Z lookup used by the graph engine) derive from those
//! matrices.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::pauli::Pauli;

type M2 = [Complex64; 4];

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Clifford(u8);

/// Right factors applied by local complementation: the complemented vertex
/// picks up `LcSelf`, each of its neighbours `LcNeighbor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LcStep {
    LcSelf,
    LcNeighbor,
}

struct Tables {
    mats: Vec<M2>,
    mul: [[u8; 24]; 24],
    inv: [u8; 24],
    conj: [[(Pauli, bool); 4]; 24],
    named: Named,
    // cz[e][a][b] = (edge, a', b')
    cz: Vec<(bool, u8, u8)>,
    reduce: Vec<Vec<LcStep>>,
}

struct Named {
    x: u8,
    y: u8,
    z: u8,
    h: u8,
    s: u8,
    sdg: u8,
    sqrt_mix: u8,
    sqrt_iz: u8,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat_mul(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn dagger(a: &M2) -> M2 {
    [a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()]
}

fn normalize(m: M2) -> M2 {
    let k = m.iter().position(|v| v.norm() > EPS).expect("zero matrix");
    let phase = m[k] / m[k].norm();
    let mut out = m;
    for v in out.iter_mut() {
        *v /= phase;
    }
    out
}

fn same(a: &M2, b: &M2) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-7)
}

fn pauli_mat(p: Pauli) -> M2 {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    match p {
        Pauli::I => [l, o, o, l],
        Pauli::X => [o, l, l, o],
        Pauli::Y => [o, c(0.0, -1.0), c(0.0, 1.0), o],
        Pauli::Z => [l, o, o, -l],
    }
}

fn find(mats: &[M2], m: &M2) -> u8 {
    let n = normalize(*m);
    mats.iter().position(|x| same(x, &n)).expect("not a Clifford") as u8
}

fn kron(a: &M2, b: &M2) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[2 * i + j] * b[2 * k + l];
                }
            }
        }
    }
    out
}

fn two_qubit_state(edge: bool, a: &M2, b: &M2, cz_after: bool) -> [Complex64; 4] {
    let mut v = [c(0.5, 0.0); 4];
    if edge {
        v[3] = -v[3];
    }
    let k = kron(a, b);
    let mut out = [c(0.0, 0.0); 4];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            *o += k[i][j] * vj;
        }
    }
    if cz_after {
        out[3] = -out[3];
    }
    out
}

fn overlap(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

fn build() -> Tables {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let id = pauli_mat(Pauli::I);
    let h: M2 = [c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)];
    let s: M2 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)];

    let mut mats = vec![normalize(id)];
    let mut i = 0;
    while i < mats.len() {
        for g in [&h, &s] {
            let m = normalize(mat_mul(g, &mats[i]));
            if !mats.iter().any(|x| same(x, &m)) {
                mats.push(m);
            }
        }
        i += 1;
    }
    assert_eq!(mats.len(), 24);

    let mut mul = [[0u8; 24]; 24];
    let mut inv = [0u8; 24];
    for a in 0..24 {
        for b in 0..24 {
            mul[a][b] = find(&mats, &mat_mul(&mats[a], &mats[b]));
            if mul[a][b] == 0 {
                inv[a] = b as u8;
            }
        }
    }

    let mut conj = [[(Pauli::I, false); 4]; 24];
    for (k, m) in mats.iter().enumerate() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let img = mat_mul(&mat_mul(m, &pauli_mat(p)), &dagger(m));
            let hit = [Pauli::X, Pauli::Y, Pauli::Z]
                .into_iter()
                .find_map(|q| {
                    let qm = pauli_mat(q);
                    if img.iter().zip(&qm).all(|(x, y)| (x - y).norm() < 1e-7) {
                        Some((q, false))
                    } else if img.iter().zip(&qm).all(|(x, y)| (x + y).norm() < 1e-7) {
                        Some((q, true))
                    } else {
                        None
                    }
                })
                .expect("Clifford maps Paulis to Paulis");
            conj[k][p.index()] = hit;
        }
    }

    let sqrt_mix: M2 = [c(r, 0.0), c(0.0, -r), c(0.0, -r), c(r, 0.0)];
    let sqrt_iz: M2 = [c(r, r), c(0.0, 0.0), c(0.0, 0.0), c(r, -r)];
    let named = Named {
        x: find(&mats, &pauli_mat(Pauli::X)),
        y: find(&mats, &pauli_mat(Pauli::Y)),
        z: find(&mats, &pauli_mat(Pauli::Z)),
        h: find(&mats, &h),
        s: find(&mats, &s),
        sdg: find(&mats, &dagger(&s)),
        sqrt_mix: find(&mats, &sqrt_mix),
        sqrt_iz: find(&mats, &sqrt_iz),
    };

    let diag: Vec<bool> = (0..24).map(|k| conj[k][Pauli::Z.index()] == (Pauli::Z, false)).collect();

    let mut candidates = Vec::with_capacity(2 * 24 * 24);
    for e in [false, true] {
        for a in 0..24 {
            for b in 0..24 {
                candidates.push((e, a as u8, b as u8, two_qubit_state(e, &mats[a], &mats[b], false)));
            }
        }
    }
    let mut cz = Vec::with_capacity(2 * 24 * 24);
    for e in [false, true] {
        for a in 0..24 {
            for b in 0..24 {
                let target = two_qubit_state(e, &mats[a], &mats[b], true);
                let hit = candidates
                    .iter()
                    .filter(|cand| overlap(&cand.3, &target) > 1.0 - 1e-9)
                    .find(|cand| (!diag[a] || diag[cand.1 as usize]) && (!diag[b] || diag[cand.2 as usize]))
                    .expect("controlled-Z table entry");
                cz.push((hit.0, hit.1, hit.2));
            }
        }
    }

    // Words that reduce each element to the identity by right factors.
    let self_factor = inv[named.sqrt_mix as usize];
    let nb_factor = inv[named.sqrt_iz as usize];
    let mut reduce = vec![Vec::new(); 24];
    for (start, word) in reduce.iter_mut().enumerate() {
        let mut prev: Vec<Option<(u8, LcStep)>> = vec![None; 24];
        let mut seen = [false; 24];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start as u8]);
        while let Some(cur) = queue.pop_front() {
            if cur == 0 {
                break;
            }
            for (f, step) in [(self_factor, LcStep::LcSelf), (nb_factor, LcStep::LcNeighbor)] {
                let nxt = mul[cur as usize][f as usize];
                if !seen[nxt as usize] {
                    seen[nxt as usize] = true;
                    prev[nxt as usize] = Some((cur, step));
                    queue.push_back(nxt);
                }
            }
        }
        let mut cur = 0u8;
        while cur as usize != start {
            let (p, step) = prev[cur as usize].expect("Clifford group is generated by the LC factors");
            word.push(step);
            cur = p;
        }
        word.reverse();
    }

    Tables { mats, mul, inv, conj, named, cz, reduce }
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(build)
}

impl Clifford {
    pub const IDENTITY: Clifford = Clifford(0);

    pub fn all() -> impl Iterator<Item = Clifford> {
        (0..24u8).map(Clifford)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Clifford {
        assert!(i < 24);
        Clifford(i as u8)
    }

    pub fn x() -> Clifford {
        Clifford(tables().named.x)
    }
    pub fn y() -> Clifford {
        Clifford(tables().named.y)
    }
    pub fn z() -> Clifford {
        Clifford(tables().named.z)
    }
    pub fn h() -> Clifford {
        Clifford(tables().named.h)
    }
    pub fn s() -> Clifford {
        Clifford(tables().named.s)
    }
    pub fn sdg() -> Clifford {
        Clifford(tables().named.sdg)
    }
    /// exp(-i pi/4 X)
    pub fn sqrt_minus_ix() -> Clifford {
        Clifford(tables().named.sqrt_mix)
    }
    /// exp(i pi/4 Z)
    pub fn sqrt_iz() -> Clifford {
        Clifford(tables().named.sqrt_iz)
    }

    pub fn pauli(p: Pauli) -> Clifford {
        match p {
            Pauli::I => Clifford::IDENTITY,
            Pauli::X => Clifford::x(),
            Pauli::Y => Clifford::y(),
            Pauli::Z => Clifford::z(),
        }
    }

    /// Operator product `self * rhs` (rhs acts first).
    pub fn then_after(self, rhs: Clifford) -> Clifford {
        Clifford(tables().mul[self.0 as usize][rhs.0 as usize])
    }

    pub fn inverse(self) -> Clifford {
        Clifford(tables().inv[self.0 as usize])
    }

    /// `self * p * self^dagger` as a signed Pauli (`true` = negative).
    pub fn conjugate(self, p: Pauli) -> (Pauli, bool) {
        tables().conj[self.0 as usize][p.index()]
    }

    /// Commutes with Z, i.e. one of I, Z, S, S^dagger.
    pub fn is_diagonal(self) -> bool {
        self.conjugate(Pauli::Z) == (Pauli::Z, false)
    }

    pub fn matrix(self) -> [Complex64; 4] {
        tables().mats[self.0 as usize]
    }

    pub(crate) fn reduction_word(self) -> &'static [LcStep] {
        &tables().reduce[self.0 as usize]
    }

    /// Controlled-Z on two qubits whose remaining neighbourhoods are handled
    /// by the caller: returns `(edge', a', b')` such that
    /// `CZ (a x b) CZ^edge |++>` equals `(a' x b') CZ^edge' |++>` up to phase.
    /// A diagonal input stays diagonal.
    pub(crate) fn cz_lookup(edge: bool, a: Clifford, b: Clifford) -> (bool, Clifford, Clifford) {
        let (e, x, y) = tables().cz[(edge as usize) * 576 + a.index() * 24 + b.index()];
        (e, Clifford(x), Clifford(y))
    }
}
