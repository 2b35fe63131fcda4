use hermite_density_wasm::{diag_json, distribution_json, hnf_json, MAX_GMAX, MAX_SAMPLES};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn hnf_example() {
    let v = parse(hnf_json("2 2\n0 3\n2 1\n").unwrap());
    assert_eq!(v["h"], serde_json::json!([["2", "1"], ["0", "3"]]));
    assert_eq!(v["pivots"], serde_json::json!(["2", "3"]));
    assert_eq!(v["rank"], 2);
    assert!(hnf_json("2 2\n1 2\n").unwrap_err().contains("line"));
}

#[test]
fn diag_prediction_and_experiment() {
    let v = parse(diag_json(2, 2, "1", 0, 1000, 0).unwrap());
    assert!((v["predicted"].as_f64().unwrap() - 0.607927).abs() < 1e-6);
    assert!(v["experiment"].is_null());
    let v = parse(diag_json(2, 2, "1", 20_000, 1_000_000, 3).unwrap());
    let emp = v["experiment"]["empirical"].as_f64().unwrap();
    assert!((emp - 0.607927).abs() < 0.02, "{emp}");
    // outside the covered range: no prediction, still sampled
    let v = parse(diag_json(2, 2, "1,1", 1000, 100, 0).unwrap());
    assert!(v["predicted"].is_null());
    assert!(v["experiment"]["hits"].as_u64().is_some());
    assert!(diag_json(2, 2, "1", MAX_SAMPLES + 1, 10, 0).is_err());
    assert!(diag_json(2, 2, "a", 10, 10, 0).is_err());
}

#[test]
fn distribution_rows() {
    let v = parse(distribution_json(5, 7).unwrap());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[1]["f"], "3/4");
    assert_eq!(rows[1]["f_n"], "23/32");
    assert!((rows[0]["d_limit"].as_f64().unwrap() - 0.264909).abs() < 1e-6);
    assert!(distribution_json(5, 0).is_err());
    assert!(distribution_json(5, MAX_GMAX + 1).is_err());
    assert!(distribution_json(0, 3).is_err());
}
