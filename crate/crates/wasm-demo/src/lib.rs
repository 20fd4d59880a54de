//! Browser bindings for three paisc operations on 2-D constraints:
//! paving, a SYMPAIS run showing chain seeds and final positions, and a
//! DMC vs SYMPAIS convergence trace. Results are returned as JSON text.

use paisc::estimators::{dmc_estimate, TracePoint};
use paisc::interval::pave;
use paisc::pimais::{pimais_run_detailed, PimaisConfig};
use paisc::{Constraint, Distribution, RngStream, Univariate};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Input distribution for the demo: uniform on the domain, or independent
/// `N(0, scale^2)` per variable when `scale > 0`.
fn distribution(c: &Constraint, scale: f64) -> Result<Distribution, String> {
    let comps = c
        .domain()
        .iter()
        .map(|iv| {
            if scale > 0.0 {
                Univariate::gaussian(0.0, scale)
            } else {
                Univariate::uniform(iv.lo, iv.hi)
            }
        })
        .collect::<paisc::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    Distribution::independent(comps).map_err(|e| e.to_string())
}

fn parse(constraint: &str, domain: &str) -> Result<Constraint, String> {
    Constraint::parse(constraint, domain).map_err(|e| e.to_string())
}

/// A light configuration so runs finish interactively.
pub fn demo_config(budget: u64) -> PimaisConfig {
    PimaisConfig {
        n_chains: 20,
        warmup: 100,
        budget,
        ..PimaisConfig::default()
    }
}

#[derive(Serialize)]
struct Chains {
    mean: f64,
    variance: f64,
    samples: u64,
    acceptance_rate: f64,
    seeds: Vec<Vec<f64>>,
    positions: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Convergence {
    dmc: Vec<TracePoint>,
    sympais: Vec<TracePoint>,
}

pub fn pave_json(constraint: &str, domain: &str, accuracy: f64, max_boxes: usize) -> Result<String, String> {
    let c = parse(constraint, domain)?;
    if !(accuracy > 0.0) || max_boxes == 0 {
        return Err("accuracy must be positive and max boxes at least 1".into());
    }
    serde_json::to_string(&pave(&c, accuracy, max_boxes)).map_err(|e| e.to_string())
}

pub fn chains_json(constraint: &str, domain: &str, scale: f64, budget: u64, seed: u64) -> Result<String, String> {
    let c = parse(constraint, domain)?;
    let p = distribution(&c, scale)?;
    let o = pimais_run_detailed(&c, &p, &demo_config(budget), RngStream::new(seed, 0)).map_err(|e| e.to_string())?;
    let out = Chains {
        mean: o.report.mean,
        variance: o.report.variance,
        samples: o.report.n_samples,
        acceptance_rate: o.acceptance_rate,
        seeds: o.seeds,
        positions: o.final_positions,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn convergence_json(constraint: &str, domain: &str, scale: f64, budget: u64, seed: u64) -> Result<String, String> {
    let c = parse(constraint, domain)?;
    let p = distribution(&c, scale)?;
    let sym = pimais_run_detailed(&c, &p, &demo_config(budget), RngStream::new(seed, 0)).map_err(|e| e.to_string())?;
    let dmc = dmc_estimate(&c, &p, budget, RngStream::new(seed, 1));
    let out = Convergence {
        dmc: dmc.trace,
        sympais: sym.report.trace,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = pave)]
pub fn pave_js(constraint: &str, domain: &str, accuracy: f64, max_boxes: usize) -> Result<String, JsError> {
    pave_json(constraint, domain, accuracy, max_boxes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = chains)]
pub fn chains_js(constraint: &str, domain: &str, scale: f64, budget: u64, seed: u64) -> Result<String, JsError> {
    chains_json(constraint, domain, scale, budget, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = convergence)]
pub fn convergence_js(constraint: &str, domain: &str, scale: f64, budget: u64, seed: u64) -> Result<String, JsError> {
    convergence_json(constraint, domain, scale, budget, seed).map_err(|e| JsError::new(&e))
}
