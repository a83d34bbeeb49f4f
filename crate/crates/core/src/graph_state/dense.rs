//! Brute-force stabilizer tableau for small registers.
//!
//! Stores stabilizer and destabilizer rows in the Aaronson-Gottesman layout.
//! Used as the reference the graph engine is checked against, so it shares
//! nothing with the graph rules beyond the Pauli string type.

use rand::Rng;

use super::pauli::{Pauli, PauliString};
use crate::{Error, Result};

pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseStabilizerState {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

/// Result of a dense Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseOutcome {
    pub value: i8,
    pub deterministic: bool,
}

impl DenseStabilizerState {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense oracle holds at most {MAX_DENSE_QUBITS} qubits, asked for {n}")));
        }
        let destab = (0..n).map(|q| PauliString::single(q, Pauli::X)).collect();
        let stab = (0..n).map(|q| PauliString::single(q, Pauli::Z)).collect();
        Ok(DenseStabilizerState { n, destab, stab })
    }

    /// Graph state on `n` qubits: `|+>` everywhere, then CZ on each edge.
    pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut s = Self::new(n)?;
        for q in 0..n {
            s.h(q);
        }
        for &(a, b) in edges {
            s.cz(a, b);
        }
        Ok(s)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    fn map_rows(&mut self, f: impl Fn(PauliString) -> PauliString) {
        for r in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            *r = f(*r);
        }
    }

    pub fn h(&mut self, q: usize) {
        let m = 1u32 << q;
        self.map_rows(|p| {
            let (x, z) = (p.x & m, p.z & m);
            let mut out = p;
            out.x = (p.x & !m) | z;
            out.z = (p.z & !m) | x;
            // X^1 Z^1 -> Z X = -X Z
            if x != 0 && z != 0 {
                out.phase = (out.phase + 2) & 3;
            }
            out
        });
    }

    pub fn s(&mut self, q: usize) {
        let m = 1u32 << q;
        self.map_rows(|p| {
            let mut out = p;
            if p.x & m != 0 {
                // X -> i X Z
                out.z ^= m;
                out.phase = (out.phase + 1) & 3;
            }
            out
        });
    }

    pub fn sdg(&mut self, q: usize) {
        self.s(q);
        self.s(q);
        self.s(q);
    }

    pub fn x(&mut self, q: usize) {
        let m = 1u32 << q;
        self.map_rows(|p| if p.z & m != 0 { p.negated() } else { p });
    }

    pub fn z(&mut self, q: usize) {
        let m = 1u32 << q;
        self.map_rows(|p| if p.x & m != 0 { p.negated() } else { p });
    }

    pub fn y(&mut self, q: usize) {
        self.x(q);
        self.z(q);
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        let (ma, mb) = (1u32 << a, 1u32 << b);
        let img_xa = PauliString { x: ma, z: mb, phase: 0 };
        let img_xb = PauliString { x: mb, z: ma, phase: 0 };
        self.map_rows(|p| {
            // p = i^r * X-part * Z-part; rebuild the X-part from images
            let mut out = PauliString { x: p.x & !(ma | mb), z: 0, phase: p.phase };
            if p.x & ma != 0 {
                out = out.mul(&img_xa);
            }
            if p.x & mb != 0 {
                out = out.mul(&img_xb);
            }
            out.mul(&PauliString { x: 0, z: p.z, phase: 0 })
        });
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.h(target);
        self.cz(control, target);
        self.h(target);
    }

    /// Measure a Hermitian Pauli product. `forced` picks the outcome of a
    /// random measurement; forcing an impossible outcome of a deterministic
    /// one is an error.
    pub fn measure(&mut self, p: PauliString, forced: Option<i8>, rng: &mut impl Rng) -> Result<DenseOutcome> {
        assert!(p.is_hermitian(), "measured operator must be Hermitian");
        if let Some(k) = self.stab.iter().position(|s| !s.commutes(&p)) {
            let pivot = self.stab[k];
            for i in 0..self.n {
                if i != k && !self.stab[i].commutes(&p) {
                    self.stab[i] = self.stab[i].mul(&pivot);
                }
                if !self.destab[i].commutes(&p) {
                    self.destab[i] = self.destab[i].mul(&pivot);
                }
            }
            let value = forced.unwrap_or(if rng.random::<bool>() { 1 } else { -1 });
            self.destab[k] = pivot;
            self.stab[k] = if value == 1 { p } else { p.negated() };
            Ok(DenseOutcome { value, deterministic: false })
        } else {
            let mut acc = PauliString::IDENTITY;
            for i in 0..self.n {
                if !self.destab[i].commutes(&p) {
                    acc = acc.mul(&self.stab[i]);
                }
            }
            debug_assert_eq!((acc.x, acc.z), (p.x, p.z));
            let value = if acc.phase == p.phase { 1 } else { -1 };
            if let Some(f) = forced {
                if f != value {
                    return Err(Error::Numeric(format!("forced outcome {f} has probability zero")));
                }
            }
            Ok(DenseOutcome { value, deterministic: true })
        }
    }

    pub fn measure_single(&mut self, q: usize, basis: Pauli, forced: Option<i8>, rng: &mut impl Rng) -> Result<DenseOutcome> {
        self.measure(PauliString::single(q, basis), forced, rng)
    }

    /// Probability that measuring `p` gives `+1`.
    pub fn probability_plus(&self, p: PauliString) -> f64 {
        let mut copy = self.clone();
        let mut dummy = crate::rng::trial_rng(0, 0);
        match copy.measure(p, Some(1), &mut dummy) {
            Ok(o) if o.deterministic => 1.0,
            Ok(_) => 0.5,
            Err(_) => 0.0,
        }
    }

    /// Reduced row-echelon generators of the stabilizer group, with signs.
    pub fn canonical(&self) -> Vec<PauliString> {
        canonical_group(&self.stab, self.n)
    }

    pub fn same_state(&self, other: &DenseStabilizerState) -> bool {
        self.n == other.n && self.canonical() == other.canonical()
    }

    /// Generators of the subgroup supported inside `keep` (a qubit mask),
    /// signs dropped. Equal for two states iff their reductions to `keep`
    /// agree up to Pauli corrections, provided both are pure there.
    pub fn restricted_unsigned(&self, keep: u32) -> Vec<PauliString> {
        let mut rows: Vec<PauliString> = self.stab.iter().map(|p| p.unsigned()).collect();
        // clear columns outside `keep` first
        let outside = !keep & mask(self.n);
        let mut r = 0;
        for col in column_order(self.n).filter(|c| bit(outside, *c)) {
            if let Some(k) = (r..rows.len()).find(|&i| has_col(&rows[i], col)) {
                rows.swap(r, k);
                let piv = rows[r];
                for i in 0..rows.len() {
                    if i != r && has_col(&rows[i], col) {
                        rows[i] = rows[i].mul(&piv).unsigned();
                    }
                }
                r += 1;
            }
        }
        let inside: Vec<PauliString> = rows[r..].to_vec();
        canonical_group(&inside, self.n).into_iter().map(|p| p.unsigned()).collect()
    }

    /// Check the tableau invariants: commuting, independent generators.
    pub fn is_valid(&self) -> bool {
        let commute = self.stab.iter().all(|a| self.stab.iter().all(|b| a.commutes(b)));
        commute && canonical_group(&self.stab, self.n).len() == self.n
    }
}

fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn bit(m: u32, col: usize) -> bool {
    m >> (col % 32) & 1 == 1
}

// Columns 0..n address X bits, n..2n address Z bits of qubit col-n.
fn column_order(n: usize) -> impl Iterator<Item = usize> {
    (0..n).flat_map(move |q| [q, q + 32])
}

fn has_col(p: &PauliString, col: usize) -> bool {
    if col < 32 {
        p.x >> col & 1 == 1
    } else {
        p.z >> (col - 32) & 1 == 1
    }
}

/// Row-reduce a commuting set of Hermitian generators into a canonical
/// list. Two independent generating sets produce the same list iff they
/// generate the same signed group.
pub fn canonical_group(gens: &[PauliString], n: usize) -> Vec<PauliString> {
    let mut rows = gens.to_vec();
    let mut r = 0;
    for col in column_order(n) {
        if let Some(k) = (r..rows.len()).find(|&i| has_col(&rows[i], col)) {
            rows.swap(r, k);
            let piv = rows[r];
            for i in 0..rows.len() {
                if i != r && has_col(&rows[i], col) {
                    rows[i] = rows[i].mul(&piv);
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_pair_stabilizers() {
        let mut s = DenseStabilizerState::new(2).unwrap();
        s.h(0);
        s.cnot(0, 1);
        let xx = PauliString::from_paulis(&[(0, Pauli::X), (1, Pauli::X)], false);
        let zz = PauliString::from_paulis(&[(0, Pauli::Z), (1, Pauli::Z)], false);
        assert_eq!(s.canonical(), canonical_group(&[xx, zz], 2));
        assert!(s.is_valid());
    }

    #[test]
    fn s_maps_plus_to_plus_i() {
        let mut s = DenseStabilizerState::new(1).unwrap();
        s.h(0);
        s.s(0);
        assert_eq!(s.canonical(), vec![PauliString::single(0, Pauli::Y)]);
        s.z(0);
        assert_eq!(s.canonical(), vec![PauliString::single(0, Pauli::Y).negated()]);
    }

    #[test]
    fn deterministic_measurement_sign() {
        let mut s = DenseStabilizerState::new(1).unwrap();
        s.x(0);
        let mut rng = crate::rng::trial_rng(0, 0);
        let o = s.measure_single(0, Pauli::Z, None, &mut rng).unwrap();
        assert_eq!(o, DenseOutcome { value: -1, deterministic: true });
        assert!(s.measure_single(0, Pauli::Z, Some(1), &mut rng).is_err());
    }

    #[test]
    fn capacity_bound() {
        assert!(DenseStabilizerState::new(13).is_err());
    }
}
