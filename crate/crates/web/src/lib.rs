//! Browser bindings: drop a network, pick a TDD pattern for a buffer state,
//! and run a short simulation. Every export returns a JSON string.

use picotdd::scheduler::{SchemeId, SchemeSpec};
use picotdd::tddconf::{dl_share, hypothetical_configs, select_config, standard_configs};
use picotdd::topology::generate_deployment;
use picotdd::{ModelConfig, Network, RunSeeds, SimulationRun, TrafficConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_js<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn err(e: picotdd::Error) -> String {
    e.to_string()
}

#[derive(Serialize)]
struct DropView {
    sites: Vec<[f64; 2]>,
    picos: Vec<[f64; 2]>,
    /// `[x, y, serving pico]`
    ues: Vec<[f64; 3]>,
    pico_radius_m: f64,
}

/// Positions of sites, picocells and UEs for the default geometry.
pub fn deployment_json(seed: u64) -> Result<String, String> {
    let cfg = ModelConfig::default().geometry;
    let d = generate_deployment(&cfg, RunSeeds::from_seed(seed).deployment).map_err(err)?;
    to_js(&DropView {
        sites: d.sites().iter().map(|p| [p.x, p.y]).collect(),
        picos: d.picocells().iter().map(|p| [p.position.x, p.position.y]).collect(),
        ues: d.ues().iter().map(|u| [u.position.x, u.position.y, u.pico as f64]).collect(),
        pico_radius_m: cfg.pico_radius_m,
    })
}

#[derive(Serialize)]
struct Choice {
    id: u8,
    pattern: String,
    dl_share: f64,
}

/// Pattern chosen for the given buffered bits, starting from `current_id`.
/// `rel13` selects the extended set reaching 1:9 and 9:1.
pub fn choose_pattern_json(dl_bits: f64, ul_bits: f64, current_id: u8, rel13: bool) -> Result<String, String> {
    let set = if rel13 { hypothetical_configs() } else { standard_configs() };
    let current = set.get(current_id).ok_or("unknown configuration id")?;
    let p = select_config(&set, dl_bits.max(0.0) as u64, ul_bits.max(0.0) as u64, current).map_err(err)?;
    to_js(&Choice { id: p.id(), pattern: p.slot_string(), dl_share: dl_share(&p) })
}

#[derive(Serialize)]
struct RunView {
    scheme: String,
    dl_mbps: f64,
    ul_mbps: f64,
    dl_completed: usize,
    ul_completed: usize,
    ul_subframe_share: f64,
}

/// One short run on the full network. Runs of a few seconds take a few
/// seconds of wall time.
pub fn simulate_json(scheme: &str, lambda_dl: f64, duration_ms: u64, seed: u64) -> Result<String, String> {
    let id: SchemeId = scheme.parse().map_err(err)?;
    let model = ModelConfig::default();
    let seeds = RunSeeds::from_seed(seed);
    let net = Network::build(&model, &seeds).map_err(err)?;
    let sim = SimulationRun {
        scheme: SchemeSpec::new(id),
        traffic: TrafficConfig { lambda_dl, ..Default::default() },
        seeds,
        duration_ms,
        warmup_ms: duration_ms / 5,
    };
    let r = picotdd::run(&net, sim).map_err(err)?;
    to_js(&RunView {
        scheme: id.to_string(),
        dl_mbps: r.dl.mean_bps / 1e6,
        ul_mbps: r.ul.mean_bps / 1e6,
        dl_completed: r.dl.completed,
        ul_completed: r.ul.completed,
        ul_subframe_share: r.ul_subframe_share,
    })
}

#[wasm_bindgen]
pub fn deployment(seed: u32) -> Result<String, JsError> {
    deployment_json(seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn choose_pattern(dl_bits: f64, ul_bits: f64, current_id: u8, rel13: bool) -> Result<String, JsError> {
    choose_pattern_json(dl_bits, ul_bits, current_id, rel13).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(scheme: &str, lambda_dl: f64, duration_ms: u32, seed: u32) -> Result<String, JsError> {
    simulate_json(scheme, lambda_dl, duration_ms.into(), seed.into()).map_err(|e| JsError::new(&e))
}
