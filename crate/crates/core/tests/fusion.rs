use ballistic::fusion::*;
use ballistic::graph_state::{Clifford, DenseStabilizerState, GraphRegister, Pauli, PauliString};
use ballistic::rng::trial_rng;
use proptest::prelude::*;
use rand::Rng;

fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Every alive vertex's stabilizer generator must be a +1 certainty of the
/// oracle state.
fn register_agrees(reg: &GraphRegister, dense: &DenseStabilizerState) -> bool {
    let gens = reg.stabilizer_generators().unwrap();
    reg.alive_vertices().all(|v| (dense.probability_plus(gens[v]) - 1.0).abs() < 1e-12)
}

fn scramble(rng: &mut impl Rng, reg: &mut GraphRegister, dense: &mut DenseStabilizerState, skip: &[usize]) {
    for v in 0..reg.vertex_count() {
        if skip.contains(&v) {
            continue;
        }
        for _ in 0..rng.random_range(0..3) {
            if rng.random() {
                reg.apply_clifford(v, Clifford::h()).unwrap();
                dense.h(v);
            } else {
                reg.apply_clifford(v, Clifford::s()).unwrap();
                dense.s(v);
            }
        }
    }
}

#[test]
fn chain_ends_fuse_into_longer_chain() {
    let mut reg = GraphRegister::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
    let mut rng = trial_rng(1, 0);
    let out = fuse_with_result(&mut reg, 2, 3, &FusionParams::type_ii(), FusionResult::Success, &mut rng).unwrap();
    assert_eq!(out.result, FusionResult::Success);
    assert!(!reg.is_alive(2) && !reg.is_alive(3));
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 4), (4, 5)]);
}

#[test]
fn zero_success_probability_only_deletes() {
    let mut reg = GraphRegister::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
    let mut rng = trial_rng(2, 0);
    let params = FusionParams::type_ii().with_success_prob(0.0);
    let out = fuse(&mut reg, 2, 3, &params, &mut rng).unwrap();
    assert_eq!(out.result, FusionResult::Failure);
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 1), (4, 5)]);
    assert_eq!(reg.alive_count(), 4);
}

#[test]
fn boosted_success_rate() {
    let params = FusionParams::boosted();
    let mut rng = trial_rng(3, 0);
    let n = 100_000;
    let mut wins = 0;
    for _ in 0..n {
        let mut reg = GraphRegister::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        if fuse(&mut reg, 1, 2, &params, &mut rng).unwrap().result == FusionResult::Success {
            wins += 1;
        }
    }
    let sigma = (0.75f64 * 0.25 / n as f64).sqrt();
    assert!((wins as f64 / n as f64 - 0.75).abs() < 3.0 * sigma);
}

#[test]
fn loss_herald_rate() {
    let params = FusionParams::type_ii().with_transmission(0.9);
    let mut rng = trial_rng(4, 0);
    let n = 50_000;
    let mut lost = 0;
    for _ in 0..n {
        let mut reg = GraphRegister::new(2);
        if fuse(&mut reg, 0, 1, &params, &mut rng).unwrap().result == FusionResult::LossHerald {
            lost += 1;
        }
    }
    let p = 1.0 - 0.81;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((lost as f64 / n as f64 - p).abs() < 3.0 * sigma);
}

#[test]
fn bond_probability_is_product() {
    let cases = [(0.75, 1.0), (0.5, 1.0), (0.75, 0.99), (0.3, 0.5)];
    for (lambda, eta) in cases {
        let params = FusionParams::boosted().with_success_prob(lambda).with_transmission(eta);
        let want = eta * eta * lambda;
        assert!((expected_bond_probability(&params) - want).abs() < 1e-15);
    }
    let p = FusionParams::boosted().with_transmission(0.99);
    assert!((expected_bond_probability(&p) - 0.735075).abs() < 1e-12);
}

#[test]
fn invalid_params_rejected() {
    let mut reg = GraphRegister::new(2);
    let mut rng = trial_rng(5, 0);
    let bad = FusionParams::type_ii().with_success_prob(1.5);
    assert!(fuse(&mut reg, 0, 1, &bad, &mut rng).is_err());
    assert!(fuse(&mut reg, 0, 0, &FusionParams::type_ii(), &mut rng).is_err());
}

#[test]
fn type_ii_matches_bell_projection() {
    let mut checked = 0;
    for case in 0..400u64 {
        let mut rng = trial_rng(6, case);
        let n = rng.random_range(3..=10);
        let edges = random_graph(&mut rng, n, 0.4);
        let mut reg = GraphRegister::from_edges(n, &edges).unwrap();
        let (a, b) = (0, 1);
        if reg.has_edge(a, b) {
            continue;
        }
        let mut dense = DenseStabilizerState::graph_state(n, &edges).unwrap();
        scramble(&mut rng, &mut reg, &mut dense, &[a, b]);
        let xz = PauliString::from_paulis(&[(a, Pauli::X), (b, Pauli::Z)], false);
        let zx = PauliString::from_paulis(&[(a, Pauli::Z), (b, Pauli::X)], false);
        let (s1, s2): (bool, bool) = (rng.random(), rng.random());
        let o1 = dense.measure(xz, Some(if s1 { -1 } else { 1 }), &mut rng);
        let o2 = dense.measure(zx, Some(if s2 { -1 } else { 1 }), &mut rng);
        if o1.is_err() || o2.is_err() {
            continue;
        }
        type_ii_success(&mut reg, a, b, s1, s2).unwrap();
        assert!(register_agrees(&reg, &dense), "case {case}");
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn type_i_matches_parity_projection() {
    for case in 0..300u64 {
        let mut rng = trial_rng(7, case);
        let n = rng.random_range(3..=10);
        let edges = random_graph(&mut rng, n, 0.4);
        let mut reg = GraphRegister::from_edges(n, &edges).unwrap();
        let (a, b) = (0, 1);
        let mut dense = DenseStabilizerState::graph_state(n, &edges).unwrap();
        scramble(&mut rng, &mut reg, &mut dense, &[a, b]);
        let m: bool = rng.random();
        let zz = PauliString::from_paulis(&[(a, Pauli::Z), (b, Pauli::Z)], false);
        dense.measure(zz, Some(if m { -1 } else { 1 }), &mut rng).unwrap();
        dense.cnot(a, b);
        type_i_success(&mut reg, a, b, m).unwrap();
        assert!(reg.is_alive(a) && !reg.is_alive(b));
        assert!(register_agrees(&reg, &dense), "case {case}");
        // b is left in |m>
        let zb = PauliString::from_paulis(&[(b, Pauli::Z)], m);
        assert!((dense.probability_plus(zb) - 1.0).abs() < 1e-12);
        let gens = reg.stabilizer_generators().unwrap();
        assert!((dense.probability_plus(gens[b]) - 1.0).abs() < 1e-12, "case {case}");
    }
}

#[test]
fn adjacent_type_ii_forgets_frames() {
    let mut reg = GraphRegister::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    type_ii_success(&mut reg, 1, 2, false, false).unwrap();
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 3)]);
    assert_eq!(reg.frame(0), None);
    assert!(reg.stabilizer_generators().is_err());
}

#[test]
fn type_i_keeps_first_vertex() {
    let mut reg = GraphRegister::from_edges(5, &[(0, 1), (2, 3), (2, 4)]).unwrap();
    let mut rng = trial_rng(8, 0);
    let out = fuse_with_result(&mut reg, 1, 2, &FusionParams::type_i(), FusionResult::Success, &mut rng).unwrap();
    assert_eq!(out.consumed, [None, Some(2)]);
    assert_eq!(reg.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 3), (1, 4)]);
}

#[test]
fn boosted_attempts_count_ancillas() {
    let mut rng = trial_rng(9, 0);
    let mut reg = GraphRegister::new(2);
    let out = fuse(&mut reg, 0, 1, &FusionParams::boosted(), &mut rng).unwrap();
    assert_eq!(out.ancilla_photons, 2);
    let mut reg = GraphRegister::new(2);
    assert_eq!(fuse(&mut reg, 0, 1, &FusionParams::type_ii(), &mut rng).unwrap().ancilla_photons, 0);
}

#[test]
fn fused_vertices_always_dead() {
    let kinds = [FusionParams::type_i(), FusionParams::type_ii(), FusionParams::boosted()];
    for case in 0..10_000u64 {
        let mut rng = trial_rng(10, case);
        let n = rng.random_range(2..=12);
        let edges = random_graph(&mut rng, n, 0.3);
        let mut reg = GraphRegister::from_edges(n, &edges).unwrap();
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let params = kinds[case as usize % 3].with_transmission(rng.random_range(0.5..=1.0));
        let out = fuse(&mut reg, a, b, &params, &mut rng).unwrap();
        for v in out.consumed.iter().flatten() {
            assert!(!reg.is_alive(*v));
            assert_eq!(reg.degree(*v), 0);
        }
        for (u, v) in reg.edges() {
            assert!(reg.is_alive(u) && reg.is_alive(v));
        }
    }
}

proptest! {
    #[test]
    fn success_complements_biadjacency(seed in any::<u64>(), n in 4usize..14) {
        let mut rng = trial_rng(seed, 0);
        let edges = random_graph(&mut rng, n, 0.35);
        let mut reg = GraphRegister::from_edges(n, &edges).unwrap();
        prop_assume!(!reg.has_edge(0, 1));
        let before: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| reg.has_edge(u, v)).collect()).collect();
        let na: Vec<usize> = reg.neighbors(0).iter().map(|&v| v as usize).collect();
        let nb: Vec<usize> = reg.neighbors(1).iter().map(|&v| v as usize).collect();
        type_ii_success(&mut reg, 0, 1, false, false).unwrap();
        for u in 2..n {
            for v in 2..n {
                if u == v {
                    continue;
                }
                let crossings = [(u, v), (v, u)]
                    .iter()
                    .filter(|(x, y)| na.contains(x) && nb.contains(y))
                    .count();
                prop_assert_eq!(reg.has_edge(u, v), before[u][v] ^ (crossings % 2 == 1));
            }
        }
    }
}
