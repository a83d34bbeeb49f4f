use ballistic_web::{mux_yields, sample_wafer, wire_success};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn perfect_wafer_spans_everywhere() {
    let v = parse(sample_wafer(5, 3, 8, 1.0, 0.0, 1));
    assert_eq!(v["crossing"], serde_json::json!([true, true, true]));
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 8);
    assert!(cells.iter().all(|row| row.as_array().unwrap().iter().all(|c| c == 3)));
    assert_eq!(v["fusions"], v["fusion_successes"]);
}

#[test]
fn failed_fusions_leave_isolated_cells() {
    let v = parse(sample_wafer(4, 2, 5, 0.0, 0.0, 2));
    assert_eq!(v["crossing"], serde_json::json!([false, false, false]));
    let cells = v["cells"].as_array().unwrap();
    assert!(cells[0].as_array().unwrap().iter().all(|c| c == 2));
    assert!(cells[1..4].iter().all(|row| row.as_array().unwrap().iter().all(|c| c == 1)));
    assert_eq!(v["fusion_successes"], 0);
}

#[test]
fn wafer_is_reproducible_and_bounded() {
    assert_eq!(sample_wafer(6, 3, 10, 0.75, 0.01, 9), sample_wafer(6, 3, 10, 0.75, 0.01, 9));
    assert!(sample_wafer(100, 100, 100, 0.75, 0.0, 1).is_err());
    assert!(sample_wafer(2, 2, 2, 1.5, 0.0, 1).is_err());
}

#[test]
fn mux_rows() {
    let v = parse(mux_yields(0.2, 4, 5000, 3));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for (s, r) in rows.iter().enumerate() {
        let q = 1.0 - 0.8f64.powi(1 << s);
        let want = q * q / f64::from(1 << s);
        assert!((r["standard"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!(r["matching"].as_f64().unwrap() >= r["sliding"].as_f64().unwrap());
    }
    assert!(mux_yields(0.2, 13, 10, 1).is_err());
    assert!(mux_yields(-0.1, 2, 10, 1).is_err());
}

#[test]
fn wire_rows() {
    let v = parse(wire_success(10, 4, 0.3, 2000, 4));
    for r in v.as_array().unwrap() {
        let l = r["L"].as_u64().unwrap() as i32;
        let want = (1.0 - 0.3f64.powi(l)).powi(10);
        assert!((r["exact"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!((r["sampled"].as_f64().unwrap() - want).abs() < 0.05);
    }
    assert!(wire_success(10, 0, 0.3, 10, 1).is_err());
    assert!(wire_success(10, 2, 1.3, 10, 1).is_err());
}
