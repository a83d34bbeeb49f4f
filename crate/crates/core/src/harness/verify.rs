//! The checks behind `ballistic verify`.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::*;
use super::run::run;
use crate::builder::{build_wafer, resource_report, UnitCellSpec, WaferSpec};
use crate::fock::{apply_interferometer, type2_fusion_success_probability, FockState, Interferometer};
use crate::fusion::FusionParams;
use crate::graph_state::{canonical_group, Basis, Clifford, DenseStabilizerState, GraphRegister};
use crate::loss_tolerance::{
    simulate_teleport, teleport_success_prob, verify_star_reduction, verify_s_gadget, CrazyGraphSpec,
};
use crate::multiplex::{
    block_multiplex, dtp_success_prob, extinction_to_z_error, matching_rmux, simulate_dtp, sliding_rmux,
    standard_mux_pair_yield, DelayNetwork, DelaySides, DtpParams, PhotonStream,
};
use crate::percolation::{
    bisect, crossing_exists, estimate_threshold, find_paths_windowed, recover_losses, BondLattice, ThresholdOptions,
};
use crate::rng::trial_rng;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type CheckFn = fn() -> Result<(bool, String)>;

pub const CHECKS: [(u32, &str, CheckFn); 17] = [
    (1, "two-photon interference", hom),
    (2, "type-II fusion success", fusion_half),
    (3, "graph engine vs dense tableau", graph_vs_dense),
    (4, "block multiplexing law", block_law),
    (5, "multiplexing yields", yields),
    (6, "loss-tolerant wire law", crazy_law),
    (7, "majority vote", majority),
    (8, "square lattice threshold", square_threshold),
    (9, "wafer spanning", wafer_span),
    (10, "filter critical fidelity", critical_fidelity_check),
    (11, "loss threshold after recovery", loss_threshold),
    (12, "dump-the-pump", dtp),
    (13, "extinction mapping", extinction),
    (14, "resource report", resources),
    (15, "S gadget and double star", gadgets),
    (16, "windowed pathfinding", pathfinding),
    (17, "determinism across thread counts", determinism),
];

/// Runs the checks with the given ids, or all when `ids` is empty.
pub fn verify(ids: &[u32]) -> Vec<Check> {
    CHECKS
        .iter()
        .filter(|(id, _, _)| ids.is_empty() || ids.contains(id))
        .map(|&(id, name, f)| {
            let start = Instant::now();
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            Check { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

fn within(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn hom() -> Result<(bool, String)> {
    let out = apply_interferometer(&FockState::basis(&[1, 1])?, &Interferometer::balanced_beamsplitter(2, 0, 1)?)?;
    let p = out.amplitude(&[1, 1]).norm_sqr();
    Ok((p <= 1e-12, format!("P(1,1) = {p:.3e}")))
}

fn fusion_half() -> Result<(bool, String)> {
    let p = type2_fusion_success_probability();
    Ok((within(p, 0.5, 1e-9), format!("success = {p:.12}")))
}

fn graph_vs_dense() -> Result<(bool, String)> {
    let failures: usize = (0..10_000u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = trial_rng(0xacc3, case);
            let n = rng.random_range(2..=10);
            let len = rng.random_range(1..=30);
            usize::from(!cross_check_case(n, len, &mut rng))
        })
        .sum();
    Ok((failures == 0, format!("{failures} of 10000 sequences disagree")))
}

/// One random sequence of H, S, CZ, local complementation and Pauli
/// measurements on both engines; true when the groups agree throughout.
fn cross_check_case(n: usize, len: usize, rng: &mut impl Rng) -> bool {
    let mut reg = GraphRegister::new(n);
    let mut dense = DenseStabilizerState::new(n).expect("n <= 10");
    for q in 0..n {
        dense.h(q);
    }
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let kind = rng.random_range(0..10);
        let b = (a + rng.random_range(1..n)) % n;
        if !reg.is_alive(a) || (matches!(kind, 4..=6) && !reg.is_alive(b)) {
            continue;
        }
        let ok = match kind {
            0 | 1 => {
                dense.h(a);
                reg.apply_clifford(a, Clifford::h()).is_ok()
            }
            2 | 3 => {
                dense.s(a);
                reg.apply_clifford(a, Clifford::s()).is_ok()
            }
            4..=6 => {
                dense.cz(a, b);
                reg.apply_cz(a, b).is_ok()
            }
            7 => reg.local_complement(a).is_ok(),
            _ => {
                let basis = [Basis::X, Basis::Y, Basis::Z][rng.random_range(0..3)];
                match reg.measure_pauli(a, basis, rng) {
                    Ok(m) => matches!(
                        dense.measure_single(a, basis.pauli(), Some(m.outcome), rng),
                        Ok(d) if d.deterministic == m.deterministic
                    ),
                    Err(_) => false,
                }
            }
        };
        let same = reg
            .stabilizer_generators()
            .map(|g| canonical_group(&g, n) == dense.canonical())
            .unwrap_or(false);
        if !ok || !same {
            return false;
        }
    }
    true
}

fn block_law() -> Result<(bool, String)> {
    let mut rng = trial_rng(40, 0);
    let s = 3;
    let stream = PhotonStream::sample(0, 1_000_000 << s, 0.2, &mut rng);
    let blocks = block_multiplex(&stream, s);
    let p = blocks.iter().filter(|&&o| o).count() as f64 / blocks.len() as f64;
    let want = 1.0 - 0.8f64.powi(8);
    let sigma = (want * (1.0 - want) / blocks.len() as f64).sqrt();
    Ok((within(p, want, 3.0 * sigma), format!("{p:.5} vs {want:.5} (3 sigma = {:.5})", 3.0 * sigma)))
}

fn yields() -> Result<(bool, String)> {
    let table = [0.0400, 0.0648, 0.0872, 0.0866, 0.0590];
    let mut ok = true;
    let mut notes = Vec::new();
    for (s, &want) in table.iter().enumerate() {
        let y = standard_mux_pair_yield(0.2, s as u32);
        ok &= within(y, want, 1e-4);
        notes.push(format!("{y:.4}"));
    }
    let f = |s: u32| standard_mux_pair_yield(0.2, s);
    ok &= f(2) > f(0) && f(4) < f(3);
    let bins = 100_000;
    let mut rng = trial_rng(50, 0);
    let a = PhotonStream::sample(0, bins, 0.2, &mut rng);
    let b = PhotonStream::sample(1, bins, 0.2, &mut rng);
    for s in 0..=6 {
        let net = DelayNetwork::new(s);
        let std = f(s);
        let sl = sliding_rmux(&a, &b, &net, DelaySides::First)?.pairs.len() as f64 / bins as f64;
        let mt = matching_rmux(&a, &b, &net, DelaySides::First)?.pairs.len() as f64 / bins as f64;
        let sigma = |y: f64| (y * (1.0 - y) / bins as f64).sqrt();
        ok &= sl >= std - 3.0 * sigma(std) && mt >= std - 3.0 * sigma(std) && mt >= sl - 3.0 * sigma(sl);
    }
    Ok((ok, format!("standard {}", notes.join(", "))))
}

fn crazy_law() -> Result<(bool, String)> {
    let spec = CrazyGraphSpec::new(50, 3, 0.1);
    let st = simulate_teleport(&spec, &mut trial_rng(60, 0), 100_000)?;
    let want = teleport_success_prob(&spec)?;
    let sigma = |p: f64| (p * (1.0 - p) / 100_000.0).sqrt();
    let mut ok = within(want, 0.95121, 5e-6) && within(st.success_rate(), want, 3.0 * sigma(want));
    let mut worst: f64 = 0.0;
    for (i, &e) in [0.05, 0.1, 0.2].iter().enumerate() {
        for l in 1..=3 {
            let spec = CrazyGraphSpec::new(20, l, e);
            let st = simulate_teleport(&spec, &mut trial_rng(60, 1 + (i * 3 + l) as u64), 100_000)?;
            let want = teleport_success_prob(&spec)?;
            let z = if sigma(want) > 0.0 { (st.success_rate() - want).abs() / sigma(want) } else { 0.0 };
            worst = worst.max(z);
            ok &= z <= 3.0;
        }
    }
    Ok((ok, format!("{:.5} vs {want:.5}, grid worst |z| = {worst:.2}", st.success_rate())))
}

fn majority() -> Result<(bool, String)> {
    let spec = CrazyGraphSpec::new(1, 7, 0.0).with_z_noise(0.1);
    let st = simulate_teleport(&spec, &mut trial_rng(70, 0), 1_000_000)?;
    let want = 0.002728;
    let sigma = (want * (1.0 - want) / 1e6f64).sqrt();
    let r = st.flip_rate();
    Ok((within(r, want, 3.0 * sigma), format!("{r:.6} vs {want} (3 sigma = {:.6})", 3.0 * sigma)))
}

fn square_threshold() -> Result<(bool, String)> {
    let est = estimate_threshold(&BondLattice::square(128), &ThresholdOptions { seed: 80, ..Default::default() })?;
    let m = est.midpoint();
    Ok(((0.48..=0.52).contains(&m), format!("threshold {m:.4} (bracket {:.4}..{:.4})", est.low, est.high)))
}

fn spanning_count(spec: &WaferSpec, cell: &UnitCellSpec, seed: u64, trials: u64, recover: bool) -> Result<u64> {
    let hits: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut lat = build_wafer(spec, cell, &mut rng)?;
            if recover {
                recover_losses(&mut lat, &mut rng)?;
            }
            Ok(crossing_exists(&lat, crate::builder::Axis::Z))
        })
        .collect();
    Ok(hits?.into_iter().filter(|&h| h).count() as u64)
}

fn wafer_span() -> Result<(bool, String)> {
    let hits = spanning_count(&WaferSpec::new(12, 6, 50), &UnitCellSpec::default_cell(), 90, 100, false)?;
    Ok((hits >= 99, format!("{hits}/100 trials span")))
}

/// Smallest fidelity at which at least 90% of default wafers span.
pub fn critical_fidelity(trials: u64, seed: u64) -> Result<crate::percolation::ThresholdEstimate> {
    let cell = UnitCellSpec::default_cell();
    let opts = ThresholdOptions { trials, tolerance: 0.005, level: 0.9, seed, ..Default::default() };
    bisect(
        |f, rng| {
            build_wafer(&WaferSpec::new(12, 6, 50).with_filter(f), &cell, rng)
                .map(|lat| crossing_exists(&lat, crate::builder::Axis::Z))
                .unwrap_or(false)
        },
        0.5,
        1.0,
        true,
        &opts,
    )
}

fn critical_fidelity_check() -> Result<(bool, String)> {
    let est = critical_fidelity(200, 100)?;
    let f = est.midpoint();
    Ok(((0.90..=0.99).contains(&f), format!("critical fidelity {f:.4}")))
}

/// Loss at which half of the recovered default wafers still span.
pub fn loss_threshold_estimate(trials: u64, seed: u64) -> Result<crate::percolation::ThresholdEstimate> {
    let cell = UnitCellSpec::default_cell();
    let opts = ThresholdOptions { trials, tolerance: 0.001, level: 0.5, seed, ..Default::default() };
    bisect(
        |eps, rng| {
            let Ok(mut lat) = build_wafer(&WaferSpec::new(12, 6, 50).with_loss(eps), &cell, rng) else {
                return false;
            };
            recover_losses(&mut lat, rng).is_ok() && crossing_exists(&lat, crate::builder::Axis::Z)
        },
        0.0,
        0.1,
        false,
        &opts,
    )
}

fn loss_threshold() -> Result<(bool, String)> {
    let est = loss_threshold_estimate(200, 110)?;
    let e = est.midpoint();
    Ok(((0.005..=0.08).contains(&e), format!("loss threshold {:.3}%", 100.0 * e)))
}

fn dtp() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, want) in [(5, 0.67232), (6, 0.73786)] {
        let params = DtpParams::new(0.2, k);
        let exact = dtp_success_prob(&params)?.heralded;
        let pulses = 100_000;
        let (h, _) = simulate_dtp(&params, pulses, &mut trial_rng(120, u64::from(k)))?;
        let mc = h as f64 / pulses as f64;
        let sigma = (exact * (1.0 - exact) / pulses as f64).sqrt();
        ok &= within(exact, want, 5e-6) && within(mc, exact, 3.0 * sigma) && (2.0 / 3.0..=0.75).contains(&exact);
        notes.push(format!("K={k}: {exact:.5} (MC {mc:.5})"));
    }
    Ok((ok, notes.join(", ")))
}

fn extinction() -> Result<(bool, String)> {
    let a = extinction_to_z_error(-50.0)?;
    let b = extinction_to_z_error(-65.0)?;
    let ok = within(a, 1e-5, 1e-18) && within(b, 3.162e-7, 3.162e-10);
    Ok((ok, format!("-50 dB -> {a:e}, -65 dB -> {b:e}")))
}

fn resources() -> Result<(bool, String)> {
    let r = resource_report(&UnitCellSpec::default_cell(), &FusionParams::boosted());
    let ok = r.photons_per_qubit_no_ancilla == 9.0 && r.photons_per_qubit_with_ancilla <= 20.0;
    Ok((
        ok,
        format!(
            "{} photons per qubit without ancillas, {} with",
            r.photons_per_qubit_no_ancilla, r.photons_per_qubit_with_ancilla
        ),
    ))
}

fn gadgets() -> Result<(bool, String)> {
    let mut ok = true;
    for l in 1..=3 {
        ok &= verify_s_gadget(l)?;
    }
    for l in 2..=4 {
        ok &= verify_star_reduction(l)?;
    }
    Ok((ok, "S gadget L = 1..3, double star L = 2..4".into()))
}

fn pathfinding() -> Result<(bool, String)> {
    let cell = UnitCellSpec::default_cell();
    let sustained: Result<Vec<usize>> = (0..100u64)
        .into_par_iter()
        .map(|t| {
            let lat = build_wafer(&WaferSpec::new(12, 6, 600), &cell, &mut trial_rng(160, t))?;
            Ok(find_paths_windowed(&lat, 1, 15)?.sustained_layers)
        })
        .collect();
    let good = sustained?.iter().filter(|&&s| s >= 500).count();
    Ok((good >= 95, format!("{good}/100 trials sustain 500 layers")))
}

/// Small configs covering every scenario, for the determinism check.
pub fn determinism_configs() -> Vec<ExperimentConfig> {
    let wafer = WaferParams { nx: 4, ny: 3, nz: 8, window: Some(3), ..Default::default() };
    let scenarios = vec![
        Scenario::MuxYield(MuxYieldParams { bins: 2000, stages: vec![0, 2, 4], ..Default::default() }),
        Scenario::WaferSpan(WaferParams { loss: 0.01, ..wafer.clone() }),
        Scenario::WaferSweep(SweepParams {
            sweep: SweepVariable::Fidelity,
            values: vec![0.8, 0.95],
            wafer: wafer.clone(),
        }),
        Scenario::BondThreshold(BondParams { size: 16, points: vec![0.3, 0.5, 0.7], ..Default::default() }),
        Scenario::CrazyGraph(CrazyParams { shots: 200, p_z: 0.05, ..Default::default() }),
        Scenario::Dtp(DtpScenario { pulses: 500, ..Default::default() }),
    ];
    scenarios
        .into_iter()
        .map(|s| ExperimentConfig { seed: 17, trials: 12, ..ExperimentConfig::new(s) })
        .collect()
}

fn determinism() -> Result<(bool, String)> {
    let mut ok = true;
    for cfg in determinism_configs() {
        let one = run(&ExperimentConfig { threads: 1, ..cfg.clone() })?;
        let eight = run(&ExperimentConfig { threads: 8, ..cfg })?;
        ok &= one.files == eight.files;
    }
    Ok((ok, format!("{} scenarios compared", determinism_configs().len())))
}
