//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The `*_json` functions hold
//! the logic and are what the native tests call.

use gpm_pim::graph::gen_er_graph;
use gpm_pim::memory::AddressMapping;
use gpm_pim::pattern::{builtin_pattern, compile_plan, Semantics};
use gpm_pim::placement::{DuplicationBudget, Placement};
use gpm_pim::sim::simulate;
use gpm_pim::{CsrGraph, PimTopology, SimOptions, SimReport};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest graph the page accepts; keeps a click under a second.
pub const MAX_VERTICES: usize = 2000;

/// 4 channels x 4 bank groups: small enough to draw every unit.
pub fn demo_topology() -> PimTopology {
    PimTopology::small(4, 4)
}

#[derive(Serialize)]
struct Stage {
    stage: &'static str,
    count: u64,
    exe_cycles: u64,
    exe_avg_ratio: f64,
    tier_fractions: [f64; 3],
    per_unit_cycles: Vec<u64>,
    steal_events: u64,
}

#[derive(Serialize)]
struct Mix {
    mapping: String,
    duplication: String,
    tier_fractions: [f64; 3],
    local_access_ratio: f64,
    dup_boundary: u32,
}

fn graph(n: usize, p: f64, seed: u64) -> Result<CsrGraph, String> {
    if n == 0 || n > MAX_VERTICES {
        return Err(format!("vertex count must be 1..={MAX_VERTICES}"));
    }
    gen_er_graph(n, p, seed).map_err(|e| e.to_string())
}

fn run(g: &CsrGraph, pattern: &str, sem: Semantics, topo: &PimTopology, opts: &SimOptions) -> Result<SimReport, String> {
    let pat = builtin_pattern(pattern).map_err(|e| e.to_string())?;
    let plan = compile_plan(&pat, sem).map_err(|e| e.to_string())?;
    let placement = Placement::for_options(g, topo, opts).map_err(|e| e.to_string())?;
    simulate(g, &plan, topo, &placement, opts).map_err(|e| e.to_string())
}

/// Runs the five-stage optimization ladder on an ER graph.
pub fn ladder_json(n: usize, p: f64, seed: u64, pattern: &str, semantics: &str) -> Result<String, String> {
    let g = graph(n, p, seed)?;
    let sem: Semantics = semantics.parse().map_err(|e: gpm_pim::Error| e.to_string())?;
    let topo = demo_topology();
    let mut opts = SimOptions { seed, ..SimOptions::default() };
    let mut rows = Vec::new();
    for stage in ["baseline", "filter", "remap", "duplication", "stealing"] {
        match stage {
            "filter" => opts.filter = true,
            "remap" => opts.mapping = AddressMapping::LocalFirst,
            "duplication" => opts.duplication = DuplicationBudget::Auto,
            "stealing" => opts.stealing = true,
            _ => {}
        }
        let r = run(&g, pattern, sem, &topo, &opts)?;
        rows.push(Stage {
            stage,
            count: r.pattern_count,
            exe_cycles: r.exe_cycles,
            exe_avg_ratio: r.exe_avg_ratio,
            tier_fractions: r.tier_fractions,
            per_unit_cycles: r.per_unit_cycles,
            steal_events: r.steal_events,
        });
    }
    Ok(serde_json::to_string(&rows).expect("rows serialize"))
}

/// Access-tier mix of one pattern under a mapping and duplication budget
/// (`none`, `auto` or a byte count).
pub fn tier_mix_json(n: usize, p: f64, seed: u64, pattern: &str, mapping: &str, duplication: &str) -> Result<String, String> {
    let g = graph(n, p, seed)?;
    let opts = SimOptions {
        mapping: mapping.parse().map_err(|e: gpm_pim::Error| e.to_string())?,
        duplication: duplication.parse().map_err(|e: gpm_pim::Error| e.to_string())?,
        seed,
        ..SimOptions::default()
    };
    let r = run(&g, pattern, Semantics::NonInduced, &demo_topology(), &opts)?;
    let mix = Mix {
        mapping: opts.mapping.to_string(),
        duplication: opts.duplication.to_string(),
        tier_fractions: r.tier_fractions,
        local_access_ratio: r.local_access_ratio,
        dup_boundary: r.dup_boundary,
    };
    Ok(serde_json::to_string(&mix).expect("mix serializes"))
}

/// Where a block address lands under a mapping.
pub fn decode_json(block_addr: u64, mapping: &str) -> Result<String, String> {
    let m: AddressMapping = mapping.parse().map_err(|e: gpm_pim::Error| e.to_string())?;
    let loc = m.decode(block_addr, &demo_topology()).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&loc).expect("location serializes"))
}

#[wasm_bindgen]
pub fn ladder(n: usize, p: f64, seed: u64, pattern: &str, semantics: &str) -> Result<String, JsError> {
    ladder_json(n, p, seed, pattern, semantics).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tier_mix(n: usize, p: f64, seed: u64, pattern: &str, mapping: &str, duplication: &str) -> Result<String, JsError> {
    tier_mix_json(n, p, seed, pattern, mapping, duplication).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decode(block_addr: u64, mapping: &str) -> Result<String, JsError> {
    decode_json(block_addr, mapping).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn num_units() -> usize {
    demo_topology().num_units()
}
