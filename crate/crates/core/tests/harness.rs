use std::path::Path;
use std::process::Command;

use ballistic::harness::{emit_figure_data, run, summarize, ExperimentConfig, FIGURE_IDS};
use ballistic::Error;

const MUX: &str = r#"
version = 1
scenario = "mux-yield"
seed = 5
trials = 3

[params]
p = 0.2
stages = [0, 1, 2, 3]
bins = 2000
"#;

const CRAZY: &str = r#"
version = 1
scenario = "crazy-graph"
seed = 6
trials = 4

[params]
n = 5
l = [1, 2]
loss = [0.1, 0.3]
shots = 200
"#;

const SWEEP: &str = r#"
version = 1
scenario = "wafer-sweep"
seed = 7
trials = 3

[params]
sweep = "loss"
values = [0.0, 0.01]

[params.wafer]
nx = 3
ny = 2
nz = 4
"#;

const BOND: &str = r#"
version = 1
scenario = "bond-threshold"
seed = 8
trials = 20

[params]
size = 8
points = [0.3, 0.5, 0.7]
estimate = false
"#;

const SPAN: &str = r#"
version = 1
scenario = "wafer-span"
seed = 9
trials = 3

[params]
nx = 3
ny = 2
nz = 6
window = 3
"#;

const DTP: &str = r#"
version = 1
scenario = "dtp"
seed = 10
trials = 2

[params]
crystals = [1, 2]
pulses = 500
"#;

fn run_into(text: &str, dir: &Path) {
    let cfg = ExperimentConfig::parse(text).unwrap();
    run(&cfg).unwrap().write_to(dir).unwrap();
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballistic"))
}

#[test]
fn unknown_keys_are_reported_together() {
    let text = format!("{MUX}colour = 1\n").replace("bins = 2000", "bins = 2000\nwidth = 3");
    let err = ExperimentConfig::parse(&text).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Config(_)));
    assert!(msg.contains("params.width") && msg.contains("colour"), "{msg}");
}

#[test]
fn bad_configs() {
    for text in [
        MUX.replace("version = 1", "version = 2"),
        MUX.replace("mux-yield", "mystery"),
        MUX.replace("p = 0.2", "p = 1.5"),
        MUX.replace("trials = 3", "trials = 0"),
        SWEEP.replace("values = [0.0, 0.01]", "values = []"),
        "version = ".to_string(),
    ] {
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{text}: {err}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn hash_ignores_threads_and_out() {
    let base = ExperimentConfig::parse(MUX).unwrap();
    let moved = ExperimentConfig::parse(&MUX.replace("trials = 3", "trials = 3\nthreads = 4\nout = \"elsewhere\"")).unwrap();
    assert_eq!(base.hash(), moved.hash());
    let reseeded = ExperimentConfig::parse(&MUX.replace("seed = 5", "seed = 6")).unwrap();
    assert_ne!(base.hash(), reseeded.hash());
    assert_eq!(base.hash().len(), 64);
}

#[test]
fn runs_do_not_depend_on_thread_count() {
    for text in [MUX, CRAZY, SWEEP, BOND, SPAN, DTP] {
        let one = ExperimentConfig::parse(&text.replace("trials =", "threads = 1\ntrials =")).unwrap();
        let all = ExperimentConfig::parse(text).unwrap();
        assert_eq!(run(&one).unwrap().files, run(&all).unwrap().files, "{text}");
    }
}

#[test]
fn records_and_manifest_agree() {
    let cfg = ExperimentConfig::parse(SPAN).unwrap();
    let out = run(&cfg).unwrap();
    let records = out.file("records.jsonl").unwrap();
    assert_eq!(records.lines().count(), 3);
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["config_hash"], cfg.hash());
    }
    let manifest: serde_json::Value = serde_json::from_str(out.file("manifest.json").unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "wafer-span");
    let lattice = out.file("trials.jsonl").unwrap();
    let parsed = ballistic::percolation::parse_json_lines(lattice).unwrap();
    assert!(parsed.iter().all(|r| r.sustained_layers.is_some()));
}

#[test]
fn yield_summary_layout() {
    let cfg = ExperimentConfig::parse(MUX).unwrap();
    let out = run(&cfg).unwrap();
    let csv = out.file("summary.csv").unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("S,standard_yield,sliding_yield,matching_yield,collisions"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r[3] >= r[2], "{r:?}");
        let s = r[0] as i32;
        let q = 1.0 - 0.8f64.powi(1 << s);
        assert!((r[1] - q * q / f64::from(1 << s)).abs() < 1e-6);
    }
    let records: Vec<serde_json::Value> =
        out.file("records.jsonl").unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let metrics: Vec<std::collections::BTreeMap<String, f64>> =
        records.iter().map(|r| serde_json::from_value(r["metrics"].clone()).unwrap()).collect();
    let refs: Vec<_> = metrics.iter().collect();
    assert_eq!(summarize(&cfg.scenario, &refs).unwrap(), csv);
}

#[test]
fn every_figure_writes_csv_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("fig4-yields", MUX, "S,standard_yield,sliding_yield,matching_yield,collisions"),
        ("mux-law", MUX, "S,closed_form,mc_block_prob,std_error"),
        ("crazy-graph-law", CRAZY, "loss,L,N,mc_success,std_error,closed_form"),
        ("loss-sweep", SWEEP, "loss,"),
        ("threshold-scan", BOND, "p,"),
    ];
    assert_eq!(cases.len(), FIGURE_IDS.len());
    for (id, text, header) in cases {
        let dir = tmp.path().join(id);
        run_into(text, &dir);
        let files = emit_figure_data(&dir, id, None).unwrap();
        assert_eq!(files.len(), 2);
        let csv = std::fs::read_to_string(dir.join(format!("{id}.csv"))).unwrap();
        assert!(csv.starts_with(header), "{id}: {csv}");
        assert!(csv.lines().count() >= 3);
        let svg = std::fs::read_to_string(dir.join(format!("{id}.svg"))).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"), "{id}");
    }
}

#[test]
fn figure_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("mux");
    run_into(MUX, &dir);
    assert!(matches!(emit_figure_data(&dir, "crazy-graph-law", None), Err(Error::Config(_))));
    assert!(matches!(emit_figure_data(&dir, "no-such-figure", None), Err(Error::Config(_))));

    std::fs::write(dir.join("records.jsonl"), "").unwrap();
    assert!(matches!(emit_figure_data(&dir, "fig4-yields", None), Err(Error::EmptyInput(_))));
    std::fs::write(dir.join("records.jsonl"), "{\"oops\": 1}\n").unwrap();
    assert!(matches!(emit_figure_data(&dir, "fig4-yields", None), Err(Error::Parse { line: 1, .. })));
    assert!(emit_figure_data(&tmp.path().join("missing"), "fig4-yields", None).is_err());
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.toml");
    std::fs::write(&good, CRAZY).unwrap();
    let out = tmp.path().join("out");
    let status = binary().arg("run").arg(&good).arg("--out").arg(&out).arg("--trials").arg("2").output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let status = binary().arg("figure").arg(&out).arg("crazy-graph-law").output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    assert!(out.join("crazy-graph-law.svg").exists());
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"trials\":2") || manifest.contains("\"trials\": 2"), "{manifest}");

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, CRAZY.replace("shots = 200", "shots = 200\nshoes = 2")).unwrap();
    let status = binary().arg("run").arg(&bad).arg("--out").arg(tmp.path().join("x")).output().unwrap().status;
    assert_eq!(status.code(), Some(2));

    let status = binary().arg("run").arg(tmp.path().join("absent.toml")).output().unwrap().status;
    assert_ne!(status.code(), Some(0));

    let numeric = tmp.path().join("numeric.toml");
    let text = BOND.replace("estimate = false", "estimate = true\ntolerance = 1e-15").replace("size = 8", "size = 4");
    std::fs::write(&numeric, text).unwrap();
    let status = binary().arg("run").arg(&numeric).arg("--out").arg(tmp.path().join("n")).output().unwrap().status;
    assert_eq!(status.code(), Some(3));

    let status = binary().args(["verify", "--only", "6,7"]).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 6);
}
