//! Graph engine against the dense tableau.

use ballistic::graph_state::{
    canonical_group, lc_equivalent, Basis, Clifford, DenseStabilizerState, GraphRegister, Pauli, PauliString,
};
use ballistic::rng::trial_rng;
use rand::Rng;

#[derive(Clone, Copy, Debug)]
enum Op {
    H(usize),
    S(usize),
    Cz(usize, usize),
    Lc(usize),
    Measure(usize, Basis),
}

fn random_ops(rng: &mut impl Rng, n: usize, len: usize) -> Vec<Op> {
    (0..len)
        .map(|_| match rng.random_range(0..10) {
            0 | 1 => Op::H(rng.random_range(0..n)),
            2 | 3 => Op::S(rng.random_range(0..n)),
            4..=6 => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                Op::Cz(a, b)
            }
            7 => Op::Lc(rng.random_range(0..n)),
            _ => Op::Measure(rng.random_range(0..n), [Basis::X, Basis::Y, Basis::Z][rng.random_range(0..3)]),
        })
        .collect()
}

fn same_group(reg: &GraphRegister, dense: &DenseStabilizerState) -> bool {
    let g = canonical_group(&reg.stabilizer_generators().unwrap(), reg.vertex_count());
    g == dense.canonical()
}

/// Runs `ops`, skipping any that touch dead vertices. Returns a description
/// of the first disagreement.
fn run_case(n: usize, ops: &[Op], rng: &mut impl Rng) -> Result<(), String> {
    let mut reg = GraphRegister::new(n);
    let mut dense = DenseStabilizerState::new(n).unwrap();
    for q in 0..n {
        dense.h(q);
    }
    for (i, op) in ops.iter().enumerate() {
        let touches = match *op {
            Op::H(a) | Op::S(a) | Op::Lc(a) | Op::Measure(a, _) => vec![a],
            Op::Cz(a, b) => vec![a, b],
        };
        if touches.iter().any(|&v| !reg.is_alive(v)) {
            assert!(match *op {
                Op::Cz(a, b) => reg.apply_cz(a, b).is_err(),
                Op::Lc(a) => reg.local_complement(a).is_err(),
                _ => true,
            });
            continue;
        }
        match *op {
            Op::H(a) => {
                reg.apply_clifford(a, Clifford::h()).unwrap();
                dense.h(a);
            }
            Op::S(a) => {
                reg.apply_clifford(a, Clifford::s()).unwrap();
                dense.s(a);
            }
            Op::Cz(a, b) => {
                reg.apply_cz(a, b).unwrap();
                dense.cz(a, b);
            }
            Op::Lc(a) => reg.local_complement(a).unwrap(),
            Op::Measure(a, basis) => {
                let m = reg.measure_pauli(a, basis, rng).unwrap();
                let d = dense
                    .measure_single(a, basis.pauli(), Some(m.outcome), rng)
                    .map_err(|e| format!("op {i} {op:?}: dense rejects outcome {}: {e}", m.outcome))?;
                if d.deterministic != m.deterministic {
                    return Err(format!("op {i} {op:?}: determinism differs"));
                }
            }
        }
        if !same_group(&reg, &dense) {
            return Err(format!("op {i} {op:?}: stabilizer groups differ"));
        }
    }
    Ok(())
}

#[test]
fn random_sequences_match_dense_oracle() {
    let mut failures = Vec::new();
    for case in 0..10_000u64 {
        let mut rng = trial_rng(0x5eed, case);
        let n = rng.random_range(2..=10);
        let len = rng.random_range(1..=30);
        let ops = random_ops(&mut rng, n, len);
        if let Err(e) = run_case(n, &ops, &mut rng) {
            failures.push(format!("case {case} n={n}: {e}\n{ops:?}"));
        }
    }
    assert!(failures.is_empty(), "{} failures, first: {}", failures.len(), failures[0]);
}

#[test]
fn cz_with_hadamard_vop_matches_oracle() {
    let mut reg = GraphRegister::new(3);
    reg.apply_cz(1, 2).unwrap();
    reg.apply_clifford(0, Clifford::h()).unwrap();
    reg.apply_cz(0, 1).unwrap();
    let mut dense = DenseStabilizerState::graph_state(3, &[(1, 2)]).unwrap();
    dense.h(0);
    dense.cz(0, 1);
    assert!(same_group(&reg, &dense));
}

#[test]
fn cz_builds_and_toggles_edges() {
    let mut reg = GraphRegister::new(2);
    reg.apply_cz(0, 1).unwrap();
    assert!(reg.has_edge(0, 1));
    reg.apply_cz(0, 1).unwrap();
    assert_eq!(reg.edge_count(), 0);
}

#[test]
fn local_complement_on_path() {
    let mut reg = GraphRegister::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    reg.local_complement(1).unwrap();
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
    reg.local_complement(1).unwrap();
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
}

#[test]
fn local_complement_preserves_state_on_random_graphs() {
    for case in 0..200u64 {
        let mut rng = trial_rng(11, case);
        let edges: Vec<(usize, usize)> =
            (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).filter(|_| rng.random_bool(0.4)).collect();
        let mut reg = GraphRegister::from_edges(8, &edges).unwrap();
        let before = DenseStabilizerState::graph_state(8, &edges).unwrap();
        reg.local_complement(rng.random_range(0..8)).unwrap();
        assert!(same_group(&reg, &before), "case {case}");
    }
}

#[test]
fn star_center_z_isolates_leaves() {
    let mut reg = GraphRegister::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    reg.measure_pauli(0, Basis::Z, &mut trial_rng(1, 0)).unwrap();
    assert_eq!(reg.edge_count(), 0);
    assert!(!reg.is_alive(0));
    assert!(reg.measure_pauli(0, Basis::X, &mut trial_rng(1, 0)).is_err());
}

#[test]
fn x_on_chain_middle_leaves_bell_pair() {
    let mut rng = trial_rng(2, 0);
    let mut reg = GraphRegister::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let m = reg.measure_pauli(1, Basis::X, &mut rng).unwrap();
    assert!(reg.has_edge(0, 2));
    let mut dense = DenseStabilizerState::graph_state(3, &[(0, 1), (1, 2)]).unwrap();
    dense.measure_single(1, Pauli::X, Some(m.outcome), &mut rng).unwrap();
    assert!(same_group(&reg, &dense));
    // the survivors form a Bell pair up to local Cliffords
    let mut bell = GraphRegister::from_edges(3, &[(0, 2)]).unwrap();
    bell.remove_lost(1).unwrap();
    assert!(lc_equivalent(&reg, &bell).unwrap());
}

#[test]
fn x_on_isolated_plus_is_always_plus() {
    let mut rng = trial_rng(3, 0);
    for _ in 0..100_000 {
        let mut reg = GraphRegister::new(1);
        let m = reg.measure_pauli(0, Basis::X, &mut rng).unwrap();
        assert_eq!(m.outcome, 1);
        assert!(m.deterministic);
    }
}

#[test]
fn lost_vertices() {
    let mut reg = GraphRegister::from_edges(3, &[(1, 2)]).unwrap();
    reg.remove_lost(0).unwrap();
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(1, 2)]);

    let star = [(0, 1), (0, 2), (0, 3), (0, 4)];
    let mut reg = GraphRegister::from_edges(5, &star).unwrap();
    reg.remove_lost(0).unwrap();
    assert_eq!(reg.edge_count(), 0);
    assert_eq!(reg.frame(1), None);
    assert!(reg.stabilizer_generators().is_err());
}

#[test]
fn z_measurement_matches_loss_adjacency() {
    for case in 0..300u64 {
        let mut rng = trial_rng(4, case);
        let n = 9;
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.random_bool(0.3)).collect();
        let a = rng.random_range(0..n);
        let mut measured = GraphRegister::from_edges(n, &edges).unwrap();
        let mut lost = measured.clone();
        measured.measure_pauli(a, Basis::Z, &mut rng).unwrap();
        lost.remove_lost(a).unwrap();
        assert_eq!(measured.edges().collect::<Vec<_>>(), lost.edges().collect::<Vec<_>>());
    }
}

#[test]
fn outcome_frequencies_follow_born_rule() {
    let shots = 10_000;
    for case in 0..12u64 {
        let mut rng = trial_rng(5, case);
        let n = 5;
        let ops = random_ops(&mut rng, n, 12);
        let mut reg = GraphRegister::new(n);
        let mut dense = DenseStabilizerState::new(n).unwrap();
        for q in 0..n {
            dense.h(q);
        }
        for op in &ops {
            match *op {
                Op::H(a) => {
                    reg.apply_clifford(a, Clifford::h()).unwrap();
                    dense.h(a);
                }
                Op::S(a) => {
                    reg.apply_clifford(a, Clifford::s()).unwrap();
                    dense.s(a);
                }
                Op::Cz(a, b) => {
                    reg.apply_cz(a, b).unwrap();
                    dense.cz(a, b);
                }
                Op::Lc(a) => reg.local_complement(a).unwrap(),
                // keep every qubit alive for the final measurement
                Op::Measure(..) => {}
            }
        }
        let target = rng.random_range(0..n);
        let basis = [Basis::X, Basis::Y, Basis::Z][rng.random_range(0..3)];
        let p = dense.probability_plus(PauliString::single(target, basis.pauli()));
        let mut plus = 0;
        for _ in 0..shots {
            let mut copy = reg.clone();
            if copy.measure_pauli(target, basis, &mut rng).unwrap().outcome == 1 {
                plus += 1;
            }
        }
        let freq = plus as f64 / shots as f64;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma + 1e-12, "case {case}: freq {freq} vs {p}");
    }
}
