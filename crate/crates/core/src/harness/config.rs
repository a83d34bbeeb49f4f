//! Experiment configuration files.
//!
//! ```toml
//! version = 1
//! scenario = "wafer-span"
//! seed = 7
//! trials = 100
//! threads = 0        # 0: one worker per core
//! out = "results/span"
//!
//! [params]
//! nz = 50
//! success_prob = 0.75
//! ```
//!
//! Scenarios and their `[params]` keys:
//!
//! | scenario        | keys |
//! |-----------------|------|
//! | `mux-yield`     | `p`, `stages`, `bins`, `sides`, `policy`, `[params.switch]` |
//! | `wafer-span`    | `nx`, `ny`, `nz`, `success_prob`, `loss`, `fidelity`, `recover`, `window`, `wires`, `cell` |
//! | `wafer-sweep`   | `sweep` (`loss`, `fidelity`, `success-prob`), `values`, `[params.wafer]` with the keys above |
//! | `bond-threshold`| `lattice` (`square`, `diamond`), `size`, `points`, `estimate`, `tolerance` |
//! | `crazy-graph`   | `n`, `l`, `loss`, `p_z`, `shots` |
//! | `dtp`           | `q`, `crystals`, `t`, `pulses` |
//!
//! Every key is optional except `version` and `scenario`. Unknown keys are
//! reported together before anything runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::builder::UnitCellSpec;
use crate::multiplex::{CollisionPolicy, DelaySides, SwitchModel};
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MuxYieldParams {
    pub p: f64,
    pub stages: Vec<u32>,
    /// Bins per stream per trial.
    pub bins: usize,
    pub sides: DelaySides,
    pub policy: CollisionPolicy,
    pub switch: SwitchModel,
}

impl Default for MuxYieldParams {
    fn default() -> Self {
        MuxYieldParams {
            p: 0.2,
            stages: (0..=6).collect(),
            bins: 100_000,
            sides: DelaySides::First,
            policy: CollisionPolicy::DropAll,
            switch: SwitchModel::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaferParams {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub success_prob: f64,
    pub loss: f64,
    /// Turns the `|+~>` filter on.
    pub fidelity: Option<f64>,
    /// Punch out lost photons before measuring connectivity.
    pub recover: bool,
    /// Pathfinding window; no pathfinding when absent.
    pub window: Option<usize>,
    pub wires: usize,
    /// Unit cell file; the bundled cell when absent.
    pub cell: Option<PathBuf>,
}

impl Default for WaferParams {
    fn default() -> Self {
        WaferParams {
            nx: 12,
            ny: 6,
            nz: 50,
            success_prob: 0.75,
            loss: 0.0,
            fidelity: None,
            recover: true,
            window: None,
            wires: 1,
            cell: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    #[default]
    Loss,
    Fidelity,
    SuccessProb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepParams {
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    pub wafer: WaferParams,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            sweep: SweepVariable::Loss,
            values: vec![0.0, 0.0025, 0.005, 0.0075, 0.01, 0.015, 0.02],
            wafer: WaferParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    #[default]
    Square,
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BondParams {
    pub lattice: LatticeKind,
    pub size: usize,
    pub points: Vec<f64>,
    /// Also bisect for the threshold.
    pub estimate: bool,
    pub tolerance: f64,
}

impl Default for BondParams {
    fn default() -> Self {
        BondParams {
            lattice: LatticeKind::Square,
            size: 64,
            points: (0..=10).map(|i| 0.4 + 0.02 * i as f64).collect(),
            estimate: true,
            tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrazyParams {
    pub n: usize,
    pub l: Vec<usize>,
    pub loss: Vec<f64>,
    pub p_z: f64,
    /// Wire realizations per trial.
    pub shots: u64,
}

impl Default for CrazyParams {
    fn default() -> Self {
        CrazyParams { n: 20, l: vec![1, 2, 3], loss: vec![0.05, 0.1, 0.2], p_z: 0.0, shots: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DtpScenario {
    pub q: f64,
    pub crystals: Vec<u32>,
    pub t: f64,
    /// Pump pulses per trial.
    pub pulses: u64,
}

impl Default for DtpScenario {
    fn default() -> Self {
        DtpScenario { q: 0.2, crystals: vec![1, 2, 3, 4, 5, 6, 7, 8], t: 1.0, pulses: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", content = "params", rename_all = "kebab-case")]
pub enum Scenario {
    MuxYield(MuxYieldParams),
    WaferSpan(WaferParams),
    WaferSweep(SweepParams),
    BondThreshold(BondParams),
    CrazyGraph(CrazyParams),
    Dtp(DtpScenario),
}

pub const SCENARIOS: [&str; 6] = ["mux-yield", "wafer-span", "wafer-sweep", "bond-threshold", "crazy-graph", "dtp"];

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::MuxYield(_) => SCENARIOS[0],
            Scenario::WaferSpan(_) => SCENARIOS[1],
            Scenario::WaferSweep(_) => SCENARIOS[2],
            Scenario::BondThreshold(_) => SCENARIOS[3],
            Scenario::CrazyGraph(_) => SCENARIOS[4],
            Scenario::Dtp(_) => SCENARIOS[5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    pub trials: u64,
    /// Worker threads; 0 uses every core. Not part of the hash.
    #[serde(skip)]
    pub threads: usize,
    /// Output directory. Not part of the hash.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub scenario: Scenario,
}

#[derive(Deserialize)]
struct RawConfig {
    version: u32,
    scenario: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default)]
    threads: usize,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    params: toml::Table,
}

fn default_trials() -> u64 {
    100
}

fn strict<T: serde::de::DeserializeOwned>(value: toml::Value, prefix: &str, unknown: &mut Vec<String>) -> Result<T> {
    serde_ignored::deserialize(value, |path| {
        let p = path.to_string();
        unknown.push(if prefix.is_empty() { p } else { format!("{prefix}.{p}") });
    })
    .map_err(|e: toml::de::Error| Error::Config(format!("{prefix}: {}", e.message().trim())))
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig { version: CONFIG_VERSION, seed: 0, trials: default_trials(), threads: 0, out: None, scenario }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut unknown = Vec::new();
        let raw: RawConfig = strict(toml::Value::Table(table), "", &mut unknown)?;
        if raw.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {} (expected {CONFIG_VERSION})", raw.version)));
        }
        let params = toml::Value::Table(raw.params);
        let u = &mut unknown;
        let scenario = match raw.scenario.as_str() {
            "mux-yield" => Scenario::MuxYield(strict(params, "params", u)?),
            "wafer-span" => Scenario::WaferSpan(strict(params, "params", u)?),
            "wafer-sweep" => Scenario::WaferSweep(strict(params, "params", u)?),
            "bond-threshold" => Scenario::BondThreshold(strict(params, "params", u)?),
            "crazy-graph" => Scenario::CrazyGraph(strict(params, "params", u)?),
            "dtp" => Scenario::Dtp(strict(params, "params", u)?),
            other => {
                return Err(Error::Config(format!("unknown scenario `{other}`; expected one of {}", SCENARIOS.join(", "))))
            }
        };
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        let cfg = ExperimentConfig {
            version: raw.version,
            seed: raw.seed,
            trials: raw.trials,
            threads: raw.threads,
            out: raw.out,
            scenario,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Range checks that need no simulation.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        match &self.scenario {
            Scenario::MuxYield(m) => {
                unit("params.p", m.p)?;
                if m.bins == 0 || m.stages.iter().any(|&s| s > 20) {
                    return Err(Error::Config("need bins >= 1 and stages <= 20".into()));
                }
                m.switch.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
            Scenario::WaferSpan(w) => check_wafer(w, "params")?,
            Scenario::WaferSweep(s) => {
                check_wafer(&s.wafer, "params.wafer")?;
                if s.values.is_empty() {
                    return Err(Error::Config("params.values is empty".into()));
                }
                for &v in &s.values {
                    unit("params.values", v)?;
                }
            }
            Scenario::BondThreshold(b) => {
                if b.size < 2 {
                    return Err(Error::Config("params.size must be >= 2".into()));
                }
                for &p in &b.points {
                    unit("params.points", p)?;
                }
                if !(b.tolerance > 0.0) {
                    return Err(Error::Config("params.tolerance must be > 0".into()));
                }
            }
            Scenario::CrazyGraph(c) => {
                if c.n == 0 || c.l.is_empty() || c.l.contains(&0) || c.loss.is_empty() || c.shots == 0 {
                    return Err(Error::Config("crazy-graph needs n >= 1, nonzero l values, loss values and shots".into()));
                }
                unit("params.p_z", c.p_z)?;
                for &e in &c.loss {
                    unit("params.loss", e)?;
                }
            }
            Scenario::Dtp(d) => {
                unit("params.q", d.q)?;
                unit("params.t", d.t)?;
                if d.crystals.is_empty() || d.crystals.contains(&0) || d.pulses == 0 {
                    return Err(Error::Config("dtp needs nonzero crystal counts and pulses".into()));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON of everything that affects results.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_wafer(w: &WaferParams, at: &str) -> Result<()> {
    if w.nx == 0 || w.ny == 0 || w.nz == 0 || w.wires == 0 {
        return Err(Error::Config(format!("{at}: wafer dimensions and wires must be >= 1")));
    }
    if w.window == Some(0) {
        return Err(Error::Config(format!("{at}.window must be >= 1")));
    }
    for (name, x) in [("success_prob", w.success_prob), ("loss", w.loss), ("fidelity", w.fidelity.unwrap_or(1.0))] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Config(format!("{at}.{name} must lie in [0, 1], got {x}")));
        }
    }
    if w.loss >= 1.0 {
        return Err(Error::Config(format!("{at}.loss must be < 1")));
    }
    Ok(())
}

/// Loads the cell named by a scenario, or the bundled one.
pub fn load_cell(path: Option<&Path>) -> Result<UnitCellSpec> {
    match path {
        None => Ok(UnitCellSpec::default_cell()),
        Some(p) => UnitCellSpec::load(p).map_err(|e| match e {
            Error::Io { .. } => e,
            other => Error::Config(format!("{}: {other}", p.display())),
        }),
    }
}
