use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::*;
use crate::builder::{build_wafer, UnitCellSpec, WaferSpec};
use crate::loss_tolerance::{simulate_teleport, teleport_success_prob, CrazyGraphSpec};
use crate::multiplex::{
    block_multiplex, dtp_success_prob, matching_rmux, simulate_dtp, sliding_rmux, standard_mux_pair_yield,
    standard_mux_prob, DelayNetwork, DtpParams, PhotonStream,
};
use crate::percolation::{
    connectivity, estimate_threshold, find_paths_windowed, recover_losses, wilson_interval,
    BondLattice, ThresholdOptions, TrialRecord,
};
use crate::rng::{substream, trial_rng};
use crate::{Error, Result};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const LATTICE_FILE: &str = "trials.jsonl";
pub const TIMING_FILE: &str = "timing.csv";
pub const THRESHOLD_FILE: &str = "threshold.csv";

/// Metrics of one trial. Key sets are fixed per scenario and config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub seed: u64,
    pub trial: u64,
    pub metrics: BTreeMap<String, f64>,
}

/// Written next to the records so figures know what produced them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub scenario: String,
    pub config: serde_json::Value,
}

/// Everything a run produces, as file name and contents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    /// Per-trial wall time in seconds, trial order.
    pub wall_seconds: Vec<f64>,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// Writes every file plus the timing sidecar into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let mut timing = String::from("trial,wall_seconds\n");
        for (i, t) in self.wall_seconds.iter().enumerate() {
            let _ = writeln!(timing, "{i},{t:.6}");
        }
        for (name, text) in self.files.iter().map(|(n, t)| (n.as_str(), t)).chain([(TIMING_FILE, &timing)]) {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

struct TrialOut {
    metrics: BTreeMap<String, f64>,
    lattice: Option<TrialRecord>,
    seconds: f64,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs every trial of `cfg` and renders the result files. Output bytes
/// depend on the config and seed only.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let hash = cfg.hash();
    let ctx = Context::new(cfg)?;
    let trials: Vec<TrialOut> = pool(cfg.threads)?.install(|| {
        (0..cfg.trials).into_par_iter().map(|t| ctx.trial(t, &hash)).collect::<Result<Vec<_>>>()
    })?;

    let mut records = String::new();
    let mut lattice = String::new();
    for (t, out) in trials.iter().enumerate() {
        let rec = ResultRecord { config_hash: hash.clone(), seed: cfg.seed, trial: t as u64, metrics: out.metrics.clone() };
        records.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        records.push('\n');
        if let Some(l) = &out.lattice {
            lattice.push_str(&l.to_json_line());
        }
    }
    let manifest = Manifest {
        config_hash: hash.clone(),
        scenario: cfg.scenario.name().to_string(),
        config: serde_json::from_str(&cfg.canonical()).expect("canonical config is JSON"),
    };
    let mut files = vec![
        (MANIFEST_FILE.to_string(), serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
        (RECORDS_FILE.to_string(), records),
    ];
    let metrics: Vec<&BTreeMap<String, f64>> = trials.iter().map(|t| &t.metrics).collect();
    files.push((SUMMARY_FILE.to_string(), summarize(&cfg.scenario, &metrics)?));
    if !lattice.is_empty() {
        files.push((LATTICE_FILE.to_string(), lattice));
    }
    if let Scenario::BondThreshold(b) = &cfg.scenario {
        if b.estimate {
            files.push((THRESHOLD_FILE.to_string(), threshold_csv(b, cfg)?));
        }
    }
    Ok(RunOutput { files, wall_seconds: trials.iter().map(|t| t.seconds).collect() })
}

/// Shared read-only state for the trials of one run.
struct Context<'a> {
    cfg: &'a ExperimentConfig,
    cell: Option<UnitCellSpec>,
    family: Option<BondLattice>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let cell = match &cfg.scenario {
            Scenario::WaferSpan(w) => Some(load_cell(w.cell.as_deref())?),
            Scenario::WaferSweep(s) => Some(load_cell(s.wafer.cell.as_deref())?),
            _ => None,
        };
        let family = match &cfg.scenario {
            Scenario::BondThreshold(b) => Some(bond_family(b)),
            _ => None,
        };
        Ok(Context { cfg, cell, family })
    }

    fn trial(&self, t: u64, hash: &str) -> Result<TrialOut> {
        let start = Instant::now();
        let seed = self.cfg.seed;
        let mut metrics = BTreeMap::new();
        let mut lattice = None;
        match &self.cfg.scenario {
            Scenario::MuxYield(m) => mux_trial(m, seed, t, &mut metrics)?,
            Scenario::WaferSpan(w) => {
                let cell = self.cell.as_ref().expect("cell loaded");
                let rec = wafer_trial(w, cell, seed, t, 0, hash)?;
                metrics.insert("crossing_x".into(), f64::from(u8::from(rec.crossing[0])));
                metrics.insert("crossing_y".into(), f64::from(u8::from(rec.crossing[1])));
                metrics.insert("crossing_z".into(), f64::from(u8::from(rec.crossing[2])));
                metrics.insert("largest_component_fraction".into(), rec.largest_component_fraction);
                if let Some(s) = rec.sustained_layers {
                    metrics.insert("sustained_layers".into(), s as f64);
                }
                lattice = Some(rec);
            }
            Scenario::WaferSweep(s) => {
                let cell = self.cell.as_ref().expect("cell loaded");
                for (i, &v) in s.values.iter().enumerate() {
                    let w = sweep_point(s, v);
                    let rec = wafer_trial(&w, cell, seed, t, i as u64 + 1, hash)?;
                    metrics.insert(format!("v{i:02}.crossing_z"), f64::from(u8::from(rec.crossing[2])));
                    metrics.insert(format!("v{i:02}.largest_component_fraction"), rec.largest_component_fraction);
                }
            }
            Scenario::BondThreshold(b) => {
                let family = self.family.as_ref().expect("family built");
                for (i, &p) in b.points.iter().enumerate() {
                    let mut rng = substream(seed, t, i as u64 + 1);
                    metrics.insert(format!("p{i:02}.crossing"), f64::from(u8::from(family.crossing(p, &mut rng))));
                }
            }
            Scenario::CrazyGraph(c) => {
                for &l in &c.l {
                    for (i, &e) in c.loss.iter().enumerate() {
                        let spec = CrazyGraphSpec { n: c.n, l, loss: e, p_z: c.p_z };
                        let mut rng = substream(seed, t, (l as u64) << 16 | i as u64);
                        let st = simulate_teleport(&spec, &mut rng, c.shots)?;
                        let key = format!("l{l}.e{i:02}");
                        metrics.insert(format!("{key}.success_rate"), st.success_rate());
                        metrics.insert(format!("{key}.flip_rate"), st.flip_rate());
                        metrics.insert(format!("{key}.tie_rate"), st.tie_rate());
                    }
                }
            }
            Scenario::Dtp(d) => {
                for &k in &d.crystals {
                    let params = DtpParams { q: d.q, crystals: k, t: d.t };
                    let mut rng = substream(seed, t, u64::from(k));
                    let (h, del) = simulate_dtp(&params, d.pulses, &mut rng)?;
                    metrics.insert(format!("k{k:02}.heralded"), h as f64 / d.pulses as f64);
                    metrics.insert(format!("k{k:02}.delivered"), del as f64 / d.pulses as f64);
                }
            }
        }
        Ok(TrialOut { metrics, lattice, seconds: start.elapsed().as_secs_f64() })
    }
}

fn bond_family(b: &BondParams) -> BondLattice {
    match b.lattice {
        LatticeKind::Square => BondLattice::square(b.size),
        LatticeKind::Diamond => BondLattice::diamond(b.size),
    }
}

pub(crate) fn sweep_point(s: &SweepParams, v: f64) -> WaferParams {
    let mut w = s.wafer.clone();
    match s.sweep {
        SweepVariable::Loss => w.loss = v,
        SweepVariable::Fidelity => w.fidelity = Some(v),
        SweepVariable::SuccessProb => w.success_prob = v,
    }
    w
}

fn mux_trial(m: &MuxYieldParams, seed: u64, t: u64, metrics: &mut BTreeMap<String, f64>) -> Result<()> {
    let mut rng = trial_rng(seed, t);
    let a = PhotonStream::sample(0, m.bins, m.p, &mut rng);
    let b = PhotonStream::sample(1, m.bins, m.p, &mut rng);
    let bins = m.bins as f64;
    for &s in &m.stages {
        let net = DelayNetwork { stages: s, switch: m.switch, policy: m.policy };
        let ba = block_multiplex(&a, s);
        let bb = block_multiplex(&b, s);
        let blocks = ba.len().max(1) as f64;
        let hits = ba.iter().filter(|&&o| o).count() as f64;
        let both = ba.iter().zip(&bb).filter(|(x, y)| **x && **y).count() as f64;
        let sliding = sliding_rmux(&a, &b, &net, m.sides)?;
        let matching = matching_rmux(&a, &b, &net, m.sides)?;
        let key = format!("s{s:02}");
        metrics.insert(format!("{key}.block_prob"), hits / blocks);
        metrics.insert(format!("{key}.standard_yield_mc"), both / bins);
        metrics.insert(format!("{key}.sliding_yield"), sliding.pairs.len() as f64 / bins);
        metrics.insert(format!("{key}.matching_yield"), matching.pairs.len() as f64 / bins);
        metrics.insert(format!("{key}.collisions"), (sliding.collisions + matching.collisions) as f64);
    }
    Ok(())
}

/// One wafer sample; `tag` separates the points of a sweep.
fn wafer_trial(w: &WaferParams, cell: &UnitCellSpec, seed: u64, t: u64, tag: u64, hash: &str) -> Result<TrialRecord> {
    let mut spec = WaferSpec::new(w.nx, w.ny, w.nz).with_success_prob(w.success_prob).with_loss(w.loss);
    if let Some(f) = w.fidelity {
        spec = spec.with_filter(f);
    }
    let mut rng = substream(seed, t, tag);
    let mut lat = build_wafer(&spec, cell, &mut rng)?;
    if w.recover && w.loss > 0.0 {
        recover_losses(&mut lat, &mut rng)?;
    }
    let c = connectivity(&lat);
    let sustained = match w.window {
        Some(win) => Some(find_paths_windowed(&lat, w.wires, win)?.sustained_layers),
        None => None,
    };
    Ok(TrialRecord {
        seed,
        trial: t,
        spec_hash: hash.to_string(),
        crossing: c.crossing,
        largest_component_fraction: c.largest_component_fraction,
        sustained_layers: sustained,
    })
}

fn threshold_csv(b: &BondParams, cfg: &ExperimentConfig) -> Result<String> {
    let opts = ThresholdOptions { trials: cfg.trials, tolerance: b.tolerance, seed: cfg.seed, ..Default::default() };
    let est = pool(cfg.threads)?.install(|| estimate_threshold(&bond_family(b), &opts))?;
    Ok(format!("low,high,midpoint,probes\n{},{},{},{}\n", est.low, est.high, est.midpoint(), est.probes.len()))
}

/// Mean of a metric over trials.
pub(crate) fn mean(metrics: &[&BTreeMap<String, f64>], key: &str) -> Result<f64> {
    if metrics.is_empty() {
        return Err(Error::EmptyInput("no trial records".into()));
    }
    let mut sum = 0.0;
    for m in metrics {
        sum += m.get(key).ok_or_else(|| Error::Shape(format!("records lack metric `{key}`")))?;
    }
    Ok(sum / metrics.len() as f64)
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(metrics: &[&BTreeMap<String, f64>], key: &str) -> Result<(f64, f64)> {
    let mu = mean(metrics, key)?;
    let n = metrics.len() as f64;
    if n < 2.0 {
        return Ok((mu, 0.0));
    }
    let var = metrics.iter().map(|m| (m[key] - mu).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mu, (var / n).sqrt()))
}

/// Successes of a 0/1 metric with its 95% Wilson interval.
pub(crate) fn spanning(metrics: &[&BTreeMap<String, f64>], key: &str) -> Result<(f64, f64, f64)> {
    let p = mean(metrics, key)?;
    let n = metrics.len() as u64;
    let hits = (p * n as f64).round() as u64;
    let (lo, hi) = wilson_interval(hits, n, 1.96);
    Ok((p, lo, hi))
}

/// Summary CSV of a scenario computed from its trial metrics.
pub fn summarize(scenario: &Scenario, metrics: &[&BTreeMap<String, f64>]) -> Result<String> {
    let mut out = String::new();
    match scenario {
        Scenario::MuxYield(m) => {
            out.push_str("S,standard_yield,sliding_yield,matching_yield,collisions\n");
            for &s in &m.stages {
                let key = format!("s{s:02}");
                let _ = writeln!(
                    out,
                    "{s},{:.6},{:.6},{:.6},{:.3}",
                    standard_mux_pair_yield(m.p, s),
                    mean(metrics, &format!("{key}.sliding_yield"))?,
                    mean(metrics, &format!("{key}.matching_yield"))?,
                    mean(metrics, &format!("{key}.collisions"))?,
                );
            }
        }
        Scenario::WaferSpan(w) => {
            let (p, lo, hi) = spanning(metrics, "crossing_z")?;
            out.push_str("metric,value\n");
            let _ = writeln!(out, "trials,{}", metrics.len());
            let _ = writeln!(out, "z_spanning,{p:.6}");
            let _ = writeln!(out, "wilson_low,{lo:.6}");
            let _ = writeln!(out, "wilson_high,{hi:.6}");
            let _ = writeln!(out, "largest_component_fraction,{:.6}", mean(metrics, "largest_component_fraction")?);
            if w.window.is_some() {
                let _ = writeln!(out, "mean_sustained_layers,{:.3}", mean(metrics, "sustained_layers")?);
            }
        }
        Scenario::WaferSweep(s) => {
            out.push_str("value,spanning,wilson_low,wilson_high,largest_component_fraction\n");
            for (i, v) in s.values.iter().enumerate() {
                let (p, lo, hi) = spanning(metrics, &format!("v{i:02}.crossing_z"))?;
                let frac = mean(metrics, &format!("v{i:02}.largest_component_fraction"))?;
                let _ = writeln!(out, "{v},{p:.6},{lo:.6},{hi:.6},{frac:.6}");
            }
        }
        Scenario::BondThreshold(b) => {
            out.push_str("p,crossing,wilson_low,wilson_high\n");
            for (i, p) in b.points.iter().enumerate() {
                let (c, lo, hi) = spanning(metrics, &format!("p{i:02}.crossing"))?;
                let _ = writeln!(out, "{p},{c:.6},{lo:.6},{hi:.6}");
            }
        }
        Scenario::CrazyGraph(c) => {
            out.push_str("loss,L,N,mc_success,std_error,closed_form,flip_rate,tie_rate\n");
            for &l in &c.l {
                for (i, &e) in c.loss.iter().enumerate() {
                    let key = format!("l{l}.e{i:02}");
                    let (mc, se) = mean_se(metrics, &format!("{key}.success_rate"))?;
                    let exact = teleport_success_prob(&CrazyGraphSpec::new(c.n, l, e))?;
                    let _ = writeln!(
                        out,
                        "{e},{l},{},{mc:.6},{se:.6},{exact:.6},{:.6},{:.6}",
                        c.n,
                        mean(metrics, &format!("{key}.flip_rate"))?,
                        mean(metrics, &format!("{key}.tie_rate"))?,
                    );
                }
            }
        }
        Scenario::Dtp(d) => {
            out.push_str("K,heralded_exact,heralded_mc,delivered_exact,delivered_mc\n");
            for &k in &d.crystals {
                let exact = dtp_success_prob(&DtpParams { q: d.q, crystals: k, t: d.t })?;
                let _ = writeln!(
                    out,
                    "{k},{:.6},{:.6},{:.6},{:.6}",
                    exact.heralded,
                    mean(metrics, &format!("k{k:02}.heralded"))?,
                    exact.delivered,
                    mean(metrics, &format!("k{k:02}.delivered"))?,
                );
            }
        }
    }
    Ok(out)
}

/// Closed-form block multiplexing probability, for figures.
pub(crate) fn block_prob_exact(p: f64, s: u32) -> f64 {
    standard_mux_prob(p, s)
}
