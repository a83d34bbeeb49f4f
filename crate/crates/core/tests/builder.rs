use std::collections::{BTreeSet, VecDeque};

use ballistic::builder::{
    apply_plus_filter, build_wafer, make_ghz3, optical_depth_report, BuiltLattice, UnitCellSpec, WaferSpec,
};
use ballistic::fusion::{FusionParams, FusionResult};
use ballistic::graph_state::{canonical_group, read_edge_list, write_edge_list, DenseStabilizerState, GraphRegister};
use ballistic::rng::trial_rng;
use ballistic::Error;
use proptest::prelude::*;

fn reachable(reg: &GraphRegister, from: usize) -> Vec<bool> {
    let mut seen = vec![false; reg.vertex_count()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        for &u in reg.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                queue.push_back(u as usize);
            }
        }
    }
    seen
}

fn edge_set(lat: &BuiltLattice) -> BTreeSet<(usize, usize)> {
    lat.register.edges().collect()
}

#[test]
fn ghz_triple_is_a_three_chain() {
    let mut reg = GraphRegister::new(0);
    let ids = make_ghz3(&mut reg);
    assert_eq!(ids, [0, 1, 2]);
    assert_eq!(reg.edge_count(), 2);
    let dense = DenseStabilizerState::graph_state(3, &[(0, 1), (1, 2)]).unwrap();
    assert_eq!(canonical_group(&reg.stabilizer_generators().unwrap(), 3), dense.canonical());
}

#[test]
fn default_cell_wiring_is_consistent() {
    let cell = UnitCellSpec::default_cell();
    let n = cell.slot_count();
    assert_eq!(n, 18);
    let comp = cell.computational_slots();
    let mut uses = vec![0; n];
    for &(a, b) in cell.intra.iter().chain(&cell.layer) {
        uses[a] += 1;
        uses[b] += 1;
    }
    for p in &cell.boundary {
        uses[p.from] += 1;
        uses[p.to] += 1;
    }
    for (s, &u) in uses.iter().enumerate() {
        assert_eq!(u, usize::from(!comp.contains(&s)), "slot {s}");
    }
    assert_eq!(2 * cell.intra_fusions + cell.boundary_fusions, n - 2);
}

#[test]
fn single_cell_perfect_fusion_is_connected() {
    let cell = UnitCellSpec::default_cell();
    let spec = WaferSpec::new(1, 1, 1).with_success_prob(1.0);
    let lat = build_wafer(&spec, &cell, &mut trial_rng(1, 0)).unwrap();
    assert!(lat.fusion_log.iter().all(|r| r.result == FusionResult::Success));
    let (p, d) = lat.computational(0, 0, 0);
    assert!(lat.register.is_alive(p) && lat.register.is_alive(d));
    assert!(reachable(&lat.register, p)[d]);
}

#[test]
fn perfect_fusion_is_deterministic() {
    let cell = UnitCellSpec::default_cell();
    let spec = WaferSpec::new(3, 2, 4).with_success_prob(1.0);
    let a = build_wafer(&spec, &cell, &mut trial_rng(2, 0)).unwrap();
    let b = build_wafer(&spec, &cell, &mut trial_rng(2, 99)).unwrap();
    assert_eq!(edge_set(&a), edge_set(&b));
}

#[test]
fn bond_retention_matches_transmission_and_success() {
    let cell = UnitCellSpec::default_cell();
    let mut spec = WaferSpec::new(12, 6, 20);
    spec.fusion = FusionParams::boosted().with_transmission(0.9);
    let (mut ok, mut total, mut trial) = (0u64, 0u64, 0);
    while total < 100_000 {
        let lat = build_wafer(&spec, &cell, &mut trial_rng(3, trial)).unwrap();
        trial += 1;
        total += lat.fusion_log.len() as u64;
        ok += lat.fusion_log.iter().filter(|r| r.result == FusionResult::Success).count() as u64;
    }
    let want = 0.9 * 0.9 * 0.75;
    let sigma = (want * (1.0 - want) / total as f64).sqrt();
    let got = ok as f64 / total as f64;
    assert!((got - want).abs() <= 3.0 * sigma, "{got} vs {want}");
}

#[test]
fn photon_accounting_is_exact() {
    let cell = UnitCellSpec::default_cell();
    let spec = WaferSpec::new(4, 3, 5);
    let lat = build_wafer(&spec, &cell, &mut trial_rng(4, 0)).unwrap();
    let r = &lat.resources;
    assert_eq!(r.fusions_attempted, lat.fusion_log.len() as u64);
    let want = (spec.cells() * cell.sources * 3) as u64 + r.fusions_attempted * u64::from(spec.fusion.ancilla_cost);
    assert_eq!(r.photons_emitted, want);
    assert_eq!(r.computational_qubits, 2 * spec.cells() as u64);
}

#[test]
fn computational_vertices_never_fused() {
    let cell = UnitCellSpec::default_cell();
    let lat = build_wafer(&WaferSpec::new(4, 3, 5), &cell, &mut trial_rng(5, 0)).unwrap();
    for r in &lat.fusion_log {
        assert!(!lat.is_computational(r.a as usize) && !lat.is_computational(r.b as usize));
    }
}

#[test]
fn filter_extremes() {
    let mut rng = trial_rng(6, 0);
    for _ in 0..100 {
        let mut reg = GraphRegister::new(0);
        let [_, mid, _] = make_ghz3(&mut reg);
        assert!(apply_plus_filter(&mut reg, mid, 1.0, &mut rng).unwrap());
        assert!(reg.is_alive(mid));
        assert!(!apply_plus_filter(&mut reg, mid, 0.0, &mut rng).unwrap());
        assert!(!reg.is_alive(mid));
        assert!(matches!(apply_plus_filter(&mut reg, mid, 1.0, &mut rng), Err(Error::VertexState { .. })));
    }
}

#[test]
fn filter_at_096_keeps_spanning() {
    let cell = UnitCellSpec::default_cell();
    let spec = WaferSpec::new(12, 6, 50).with_filter(0.96);
    let hits = (0..100)
        .filter(|&t| {
            let lat = build_wafer(&spec, &cell, &mut trial_rng(7, t)).unwrap();
            ballistic::percolation::crossing_exists(&lat, ballistic::builder::Axis::Z)
        })
        .count();
    assert!(hits >= 90, "{hits}/100");
}

#[test]
fn optical_depth_of_default_cell() {
    let cell = UnitCellSpec::default_cell();
    let r = optical_depth_report(&cell);
    assert!(r.max <= 12, "max depth {}", r.max);
    let comp = cell.computational_slots();
    for s in &r.slots {
        assert!(s.crossings <= 1, "slot {}", s.slot);
        assert_eq!(s.active_phase_shifters, u32::from(comp.contains(&s.slot)));
    }
}

#[test]
fn cellspec_round_trip_and_rejections() {
    let cell = UnitCellSpec::default_cell();
    assert_eq!(UnitCellSpec::parse(&cell.to_toml()).unwrap(), cell);

    let mut fused_comp = cell.clone();
    fused_comp.intra[0] = (cell.computational.primal, cell.intra[0].1);
    assert!(matches!(fused_comp.validate(), Err(Error::Spec(_))));

    let wrong_format = cell.to_toml().replace("cellspec v1", "cellspec v2");
    assert!(UnitCellSpec::parse(&wrong_format).is_err());

    let unknown = format!("{}\ncolour = \"red\"\n", cell.to_toml());
    assert!(UnitCellSpec::parse(&unknown).is_err());
}

#[test]
fn invalid_wafer_is_rejected_before_sampling() {
    let cell = UnitCellSpec::default_cell();
    for spec in [WaferSpec::new(0, 1, 1), WaferSpec::new(1, 1, 1).with_loss(1.0), WaferSpec::new(1, 1, 1).with_filter(1.5)] {
        assert!(matches!(build_wafer(&spec, &cell, &mut trial_rng(8, 0)), Err(Error::Spec(_))));
    }
}

#[test]
fn exports() {
    let cell = UnitCellSpec::default_cell();
    let lat = build_wafer(&WaferSpec::new(2, 2, 2), &cell, &mut trial_rng(9, 0)).unwrap();
    let csv = lat.side_table_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,z,primal_id,dual_id"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[1], format!("1,0,0,{},{}", lat.computational(1, 0, 0).0, lat.computational(1, 0, 0).1));

    let text = write_edge_list(&lat.register);
    assert!(text.starts_with(&format!("graphstate v1 {}\n", lat.register.vertex_count())));
    let (back, _) = read_edge_list(&text).unwrap();
    assert_eq!(back.edges().collect::<BTreeSet<_>>(), edge_set(&lat));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn builds_are_reproducible(seed in any::<u64>(), loss in 0.0f64..0.1, f in 0.8f64..1.0) {
        let cell = UnitCellSpec::default_cell();
        let spec = WaferSpec::new(3, 2, 3).with_loss(loss).with_filter(f);
        let a = build_wafer(&spec, &cell, &mut trial_rng(seed, 1)).unwrap();
        let b = build_wafer(&spec, &cell, &mut trial_rng(seed, 1)).unwrap();
        prop_assert_eq!(edge_set(&a), edge_set(&b));
        prop_assert_eq!(a.lost, b.lost);
        prop_assert_eq!(a.fusion_log, b.fusion_log);
    }
}
