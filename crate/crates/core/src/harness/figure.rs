use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Scenario, SweepVariable};
use super::run::{block_prob_exact, mean, mean_se, spanning, Manifest, ResultRecord, MANIFEST_FILE, RECORDS_FILE};
use super::svg::{Chart, Series};
use crate::loss_tolerance::{teleport_success_prob, CrazyGraphSpec};
use crate::multiplex::standard_mux_pair_yield;
use crate::{Error, Result};

pub const FIGURE_IDS: [&str; 5] = ["fig4-yields", "mux-law", "crazy-graph-law", "loss-sweep", "threshold-scan"];

#[derive(Clone, Debug, PartialEq)]
pub struct FigureData {
    pub csv: String,
    pub svg: String,
}

fn wrong_source(id: &str, want: &str, got: &str) -> Error {
    Error::Config(format!("figure {id} needs a {want} run, these results come from {got}"))
}

/// Builds one figure from a scenario and its trial metrics.
pub fn figure_data(scenario: &Scenario, metrics: &[&BTreeMap<String, f64>], id: &str) -> Result<FigureData> {
    if !FIGURE_IDS.contains(&id) {
        return Err(Error::Config(format!("unknown figure `{id}`; valid ids: {}", FIGURE_IDS.join(", "))));
    }
    if metrics.is_empty() {
        return Err(Error::EmptyInput("result file holds no records".into()));
    }
    let mut csv = String::new();
    let chart = match (id, scenario) {
        ("fig4-yields", Scenario::MuxYield(m)) => {
            csv.push_str("S,standard_yield,sliding_yield,matching_yield,collisions\n");
            let mut series = [Vec::new(), Vec::new(), Vec::new()];
            for &s in &m.stages {
                let std = standard_mux_pair_yield(m.p, s);
                let sl = mean(metrics, &format!("s{s:02}.sliding_yield"))?;
                let mt = mean(metrics, &format!("s{s:02}.matching_yield"))?;
                let col = mean(metrics, &format!("s{s:02}.collisions"))?;
                let _ = writeln!(csv, "{s},{std:.6},{sl:.6},{mt:.6},{col:.3}");
                for (v, y) in series.iter_mut().zip([std, sl, mt]) {
                    v.push((f64::from(s), y));
                }
            }
            let [a, b, c] = series;
            Chart {
                title: format!("Pair yield per bin, p = {}", m.p),
                x_label: "delay stages S".into(),
                y_label: "pairs per bin".into(),
                series: vec![Series::line("standard", a), Series::line("sliding window", b), Series::line("matching", c)],
                y_range: None,
            }
        }
        ("mux-law", Scenario::MuxYield(m)) => {
            csv.push_str("S,closed_form,mc_block_prob,std_error\n");
            let (mut exact, mut mc) = (Vec::new(), Vec::new());
            for &s in &m.stages {
                let e = block_prob_exact(m.p, s);
                let (mu, se) = mean_se(metrics, &format!("s{s:02}.block_prob"))?;
                let _ = writeln!(csv, "{s},{e:.6},{mu:.6},{se:.6}");
                exact.push((f64::from(s), e));
                mc.push((f64::from(s), mu));
            }
            Chart {
                title: format!("Block multiplexing, p = {}", m.p),
                x_label: "delay stages S".into(),
                y_label: "photon probability per block".into(),
                series: vec![Series::line("1 - (1 - p)^(2^S)", exact), Series::points("Monte Carlo", mc)],
                y_range: Some((0.0, 1.0)),
            }
        }
        ("crazy-graph-law", Scenario::CrazyGraph(c)) => {
            csv.push_str("loss,L,N,mc_success,std_error,closed_form\n");
            let mut series = Vec::new();
            for &l in &c.l {
                let (mut exact, mut mc) = (Vec::new(), Vec::new());
                for (i, &e) in c.loss.iter().enumerate() {
                    let (mu, se) = mean_se(metrics, &format!("l{l}.e{i:02}.success_rate"))?;
                    let x = teleport_success_prob(&CrazyGraphSpec::new(c.n, l, e))?;
                    let _ = writeln!(csv, "{e},{l},{},{mu:.6},{se:.6},{x:.6}", c.n);
                    exact.push((e, x));
                    mc.push((e, mu));
                }
                series.push(Series::line(format!("L = {l} exact"), exact));
                series.push(Series::points(format!("L = {l} MC"), mc));
            }
            Chart {
                title: format!("Wire success, N = {}", c.n),
                x_label: "loss per qubit".into(),
                y_label: "success probability".into(),
                series,
                y_range: Some((0.0, 1.0)),
            }
        }
        ("loss-sweep", Scenario::WaferSweep(s)) => {
            if s.sweep != SweepVariable::Loss {
                return Err(Error::Config(format!("figure {id} needs a loss sweep, got {:?}", s.sweep)));
            }
            sweep_chart(&mut csv, "loss", &s.values, metrics, "Spanning after loss recovery")?
        }
        ("threshold-scan", Scenario::WaferSweep(s)) => {
            let name = match s.sweep {
                SweepVariable::Loss => "loss",
                SweepVariable::Fidelity => "fidelity",
                SweepVariable::SuccessProb => "success_prob",
            };
            sweep_chart(&mut csv, name, &s.values, metrics, "Wafer spanning")?
        }
        ("threshold-scan", Scenario::BondThreshold(b)) => {
            let keys: Vec<String> = (0..b.points.len()).map(|i| format!("p{i:02}.crossing")).collect();
            curve_chart(&mut csv, "p", &b.points, &keys, metrics, &format!("{:?} lattice crossing, size {}", b.lattice, b.size))?
        }
        (_, other) => {
            let want = match id {
                "fig4-yields" | "mux-law" => "mux-yield",
                "crazy-graph-law" => "crazy-graph",
                "loss-sweep" => "wafer-sweep",
                _ => "wafer-sweep or bond-threshold",
            };
            return Err(wrong_source(id, want, other.name()));
        }
    };
    Ok(FigureData { csv, svg: chart.render() })
}

fn sweep_chart(
    csv: &mut String,
    name: &str,
    values: &[f64],
    metrics: &[&BTreeMap<String, f64>],
    title: &str,
) -> Result<Chart> {
    let keys: Vec<String> = (0..values.len()).map(|i| format!("v{i:02}.crossing_z")).collect();
    curve_chart(csv, name, values, &keys, metrics, title)
}

fn curve_chart(
    csv: &mut String,
    name: &str,
    xs: &[f64],
    keys: &[String],
    metrics: &[&BTreeMap<String, f64>],
    title: &str,
) -> Result<Chart> {
    let _ = writeln!(csv, "{name},crossing,wilson_low,wilson_high");
    let (mut mid, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for (&x, key) in xs.iter().zip(keys) {
        let (p, l, h) = spanning(metrics, key)?;
        let _ = writeln!(csv, "{x},{p:.6},{l:.6},{h:.6}");
        mid.push((x, p));
        lo.push((x, l));
        hi.push((x, h));
    }
    Ok(Chart {
        title: title.into(),
        x_label: name.into(),
        y_label: "crossing probability".into(),
        series: vec![Series::line("estimate", mid), Series::line("95% low", lo), Series::line("95% high", hi)],
        y_range: Some((0.0, 1.0)),
    })
}

/// Reads a run directory (or its records file) and writes
/// `<figure-id>.csv` and `<figure-id>.svg` into `out`, defaulting to the
/// run directory.
pub fn emit_figure_data(results: &Path, id: &str, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    if !FIGURE_IDS.contains(&id) {
        return Err(Error::Config(format!("unknown figure `{id}`; valid ids: {}", FIGURE_IDS.join(", "))));
    }
    let (dir, records_path) = if results.is_dir() {
        (results.to_path_buf(), results.join(RECORDS_FILE))
    } else {
        (results.parent().map(Path::to_path_buf).unwrap_or_default(), results.to_path_buf())
    };
    let text = std::fs::read_to_string(&records_path).map_err(|e| Error::io(&records_path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: ResultRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        records.push(r);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!("{} holds no records", records_path.display())));
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    let mtext = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&mtext).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    if let Some(r) = records.iter().find(|r| r.config_hash != manifest.config_hash) {
        return Err(Error::Config(format!("record {} was produced by another config", r.trial)));
    }
    let scenario: Scenario = serde_json::from_value(manifest.config.clone())
        .map_err(|e| Error::Config(format!("{}: {e}", manifest_path.display())))?;
    let metrics: Vec<&BTreeMap<String, f64>> = records.iter().map(|r| &r.metrics).collect();
    let fig = figure_data(&scenario, &metrics, id)?;
    let out = out.map(Path::to_path_buf).unwrap_or(dir);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut written = Vec::new();
    for (ext, body) in [("csv", &fig.csv), ("svg", &fig.svg)] {
        let path = out.join(format!("{id}.{ext}"));
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
