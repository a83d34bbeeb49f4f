//! Measurement flow on the dense oracle.
//!
//! A single input qubit in a Pauli eigenstate is joined by CZ to the
//! attachment qubits of a prepared graph, then qubits are measured in order
//! and the output column is decoded as a repetition code with logical
//! `X = X_first` and `Z = Z` on every output qubit. Running all six
//! eigenstates under one outcome record identifies the logical gate up to
//! a Pauli frame.

use rand::Rng;
use serde::Serialize;

use crate::graph_state::{DenseStabilizerState, Pauli, PauliString, MAX_DENSE_QUBITS};
use crate::{Error, Result};

/// A measurement pattern on `qubits` dense qubits. Qubit `input` starts in
/// the eigenstate under test; every other qubit starts in `|+>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub qubits: usize,
    pub input: usize,
    pub edges: Vec<(usize, usize)>,
    /// Measured before the input is attached.
    pub premeasure: Vec<(usize, Pauli)>,
    pub attach: Vec<usize>,
    pub measure: Vec<(usize, Pauli)>,
    pub output: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogicalGate {
    Identity,
    Hadamard,
    Phase,
}

impl LogicalGate {
    const ALL: [LogicalGate; 3] = [LogicalGate::Identity, LogicalGate::Hadamard, LogicalGate::Phase];

    /// `G P G^dagger` as (axis, sign).
    fn conjugate(self, p: Pauli) -> (Pauli, i8) {
        match (self, p) {
            (LogicalGate::Identity, p) => (p, 1),
            (LogicalGate::Hadamard, Pauli::X) => (Pauli::Z, 1),
            (LogicalGate::Hadamard, Pauli::Z) => (Pauli::X, 1),
            (LogicalGate::Hadamard, p) => (p, -1),
            (LogicalGate::Phase, Pauli::X) => (Pauli::Y, 1),
            (LogicalGate::Phase, Pauli::Y) => (Pauli::X, -1),
            (LogicalGate::Phase, p) => (p, 1),
        }
    }
}

const EIGENSTATES: [(Pauli, i8); 6] =
    [(Pauli::X, 1), (Pauli::X, -1), (Pauli::Y, 1), (Pauli::Y, -1), (Pauli::Z, 1), (Pauli::Z, -1)];

/// One run: the outcomes seen and the decoded output `(axis, sign)`, or
/// `None` when the output is not a pure logical eigenstate.
struct Run {
    outcomes: Vec<i8>,
    output: Option<(Pauli, i8)>,
}

impl Flow {
    fn check(&self) -> Result<()> {
        if self.qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!(
                "flow needs {} qubits, the dense oracle holds {MAX_DENSE_QUBITS}",
                self.qubits
            )));
        }
        if self.output.is_empty() {
            return Err(Error::Shape("flow has no output qubits".into()));
        }
        Ok(())
    }

    fn run(&self, eigen: (Pauli, i8), record: &[i8]) -> Result<Run> {
        let n = self.qubits;
        let mut st = DenseStabilizerState::new(n)?;
        let mut rng = crate::rng::trial_rng(0, 0);
        for q in (0..n).filter(|&q| q != self.input) {
            st.h(q);
        }
        for &(a, b) in &self.edges {
            st.cz(a, b);
        }
        let w = self.input;
        match eigen.0 {
            Pauli::X => st.h(w),
            Pauli::Y => {
                st.h(w);
                st.s(w);
            }
            _ => {}
        }
        if eigen.1 < 0 {
            match eigen.0 {
                Pauli::Z => st.x(w),
                _ => st.z(w),
            }
        }
        let mut outcomes = Vec::new();
        let mut measure = |st: &mut DenseStabilizerState, q: usize, p: Pauli, k: usize| -> Result<()> {
            let op = PauliString::single(q, p);
            let pp = st.probability_plus(op);
            let forced = if pp == 0.5 { Some(record[k % record.len()]) } else { None };
            outcomes.push(st.measure(op, forced, &mut rng)?.value);
            Ok(())
        };
        let mut k = 0;
        for &(q, p) in &self.premeasure {
            measure(&mut st, q, p, k)?;
            k += 1;
        }
        for &a in &self.attach {
            st.cz(w, a);
        }
        for &(q, p) in &self.measure {
            measure(&mut st, q, p, k)?;
            k += 1;
        }
        Ok(Run { outcomes, output: self.decode(&st) })
    }

    fn decode(&self, st: &DenseStabilizerState) -> Option<(Pauli, i8)> {
        let first = self.output[0];
        let sign = |p: PauliString| match st.probability_plus(p) {
            x if x == 1.0 => Some(1),
            x if x == 0.0 => Some(-1),
            _ => None,
        };
        for &o in &self.output[1..] {
            sign(PauliString::from_paulis(&[(first, Pauli::X), (o, Pauli::X)], false))?;
        }
        let rest = || self.output[1..].iter().map(|&o| (o, Pauli::Z));
        let xbar = PauliString::single(first, Pauli::X);
        let zbar: Vec<(usize, Pauli)> = std::iter::once((first, Pauli::Z)).chain(rest()).collect();
        let ybar: Vec<(usize, Pauli)> = std::iter::once((first, Pauli::Y)).chain(rest()).collect();
        let candidates = [
            (Pauli::X, xbar),
            (Pauli::Y, PauliString::from_paulis(&ybar, false)),
            (Pauli::Z, PauliString::from_paulis(&zbar, false)),
        ];
        let mut found = None;
        for (axis, op) in candidates {
            if let Some(s) = sign(op) {
                if found.is_some() {
                    return None;
                }
                found = Some((axis, s));
            }
        }
        found
    }

    /// Gate applied under one outcome record, up to a Pauli frame, or
    /// `None` if the six runs fit no gate of the list.
    fn gate_for_record(&self, record: &[i8]) -> Result<Option<LogicalGate>> {
        let mut runs = Vec::with_capacity(6);
        for e in EIGENSTATES {
            runs.push(self.run(e, record)?);
        }
        if runs.iter().any(|r| r.outcomes != runs[0].outcomes) {
            return Ok(None);
        }
        let outputs: Option<Vec<(Pauli, i8)>> = runs.iter().map(|r| r.output).collect();
        let Some(outputs) = outputs else {
            return Ok(None);
        };
        for gate in LogicalGate::ALL {
            for frame in Pauli::ALL {
                let fits = EIGENSTATES.iter().zip(&outputs).all(|(&(p, s), &out)| {
                    let (axis, gs) = gate.conjugate(p);
                    let fs = if frame.commutes_with(axis) { 1 } else { -1 };
                    out == (axis, s * gs * fs)
                });
                if fits {
                    return Ok(Some(gate));
                }
            }
        }
        Ok(None)
    }

    /// The logical gate if every sampled outcome record gives the same one.
    pub fn logical_gate(&self, records: usize, rng: &mut impl Rng) -> Result<Option<LogicalGate>> {
        self.check()?;
        let len = self.premeasure.len() + self.measure.len();
        let mut seen = None;
        for _ in 0..records.max(1) {
            let record: Vec<i8> = (0..len.max(1)).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            match (self.gate_for_record(&record)?, seen) {
                (None, _) => return Ok(None),
                (Some(g), None) => seen = Some(g),
                (Some(g), Some(s)) if g != s => return Ok(None),
                _ => {}
            }
        }
        Ok(seen)
    }
}
