use paisc_wasm_demo::{chains_json, convergence_json, pave_json};
use serde_json::Value;

const CIRCLE: &str = "x*x + y*y <= 1";
const DOMAIN: &str = "x -2 2\ny -2 2";

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn pave_returns_boxes() {
    let v = parse(pave_json(CIRCLE, DOMAIN, 0.05, 512).unwrap());
    assert!(!v["inner"].as_array().unwrap().is_empty());
    assert!(!v["outer"].as_array().unwrap().is_empty());
    assert!(pave_json(CIRCLE, DOMAIN, 0.0, 512).is_err());
    assert!(pave_json("x + <= 1", DOMAIN, 0.05, 512).unwrap_err().contains("offset"));
}

#[test]
fn chains_stay_feasible() {
    let v = parse(chains_json(CIRCLE, DOMAIN, 0.0, 20_000, 3).unwrap());
    let pos = v["positions"].as_array().unwrap();
    assert_eq!(pos.len(), 20);
    for p in pos {
        let (x, y) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
        assert!(x * x + y * y <= 1.0);
    }
    let mean = v["mean"].as_f64().unwrap();
    let se = v["variance"].as_f64().unwrap().sqrt();
    assert!((mean - std::f64::consts::PI / 16.0).abs() < 4.0 * se + 1e-3, "{mean} ± {se}");
    assert_eq!(v["samples"], 20_000);
}

#[test]
fn convergence_has_both_traces() {
    let v = parse(convergence_json(CIRCLE, DOMAIN, 1.0, 20_000, 3).unwrap());
    for k in ["dmc", "sympais"] {
        let t = v[k].as_array().unwrap();
        assert!(!t.is_empty());
        assert!(t.last().unwrap()["samples_used"].as_u64().unwrap() <= 20_000);
    }
}

#[test]
fn small_budget_is_an_error() {
    assert!(chains_json(CIRCLE, DOMAIN, 0.0, 100, 1).is_err());
}
