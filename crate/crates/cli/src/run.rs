//! Loading inputs and running the count, simulate and sweep commands.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context;
use gpm_pim::graph::{load_csr_binary, load_edge_list};
use gpm_pim::memory::AddressMapping;
use gpm_pim::pattern::{builtin_pattern, compile_plan, reference_count, LoopPlan, Semantics};
use gpm_pim::placement::{DuplicationBudget, Placement};
use gpm_pim::sim::simulate;
use gpm_pim::{CsrGraph, SimOptions, SimReport};
use serde::Serialize;

use crate::config::{usage, GraphFormat, RunConfig};

/// Reads the configured graph and relabels it into degree order.
pub fn load_graph(cfg: &RunConfig) -> anyhow::Result<CsrGraph> {
    let path = cfg.graph.as_deref().ok_or_else(|| usage("no input graph (use --graph)"))?;
    load_graph_file(path, cfg.format)
}

pub fn load_graph_file(path: &Path, format: GraphFormat) -> anyhow::Result<CsrGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let g = match format {
        GraphFormat::Edgelist => load_edge_list(BufReader::new(file)),
        GraphFormat::Csr => load_csr_binary(BufReader::new(file)),
    }
    .with_context(|| format!("reading {}", path.display()))?;
    Ok(if g.is_degree_ordered() { g } else { g.normalize_degree_order().0 })
}

/// The plans a pattern name stands for, each with its display label.
pub fn plans_for(name: &str, semantics: Semantics) -> anyhow::Result<Vec<(String, LoopPlan)>> {
    let parts: Vec<(&str, &str, Semantics)> = match name {
        "3mc" => vec![
            ("triangle", "3cc", semantics),
            ("wedge", "wedge", Semantics::Induced),
        ],
        other => vec![(other, other, semantics)],
    };
    parts
        .into_iter()
        .map(|(label, pat, sem)| {
            let p = builtin_pattern(pat).map_err(|e| usage(e.to_string()))?;
            Ok((label.to_string(), compile_plan(&p, sem)?))
        })
        .collect()
}

/// `(label, count)` per plan from the functional executor.
pub fn count(cfg: &RunConfig, g: &CsrGraph) -> anyhow::Result<Vec<(String, u64)>> {
    Ok(plans_for(&cfg.pattern, cfg.semantics)?
        .into_iter()
        .map(|(label, plan)| (label, reference_count(&plan, g, None).0))
        .collect())
}

fn run_one(g: &CsrGraph, plan: &LoopPlan, cfg: &RunConfig, opts: &SimOptions) -> anyhow::Result<SimReport> {
    let placement = Placement::for_options(g, &cfg.topology, opts)?;
    Ok(simulate(g, plan, &cfg.topology, &placement, opts)?)
}

/// One row of simulate or sweep output.
#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub label: String,
    pub report: SimReport,
}

/// Full report document: the resolved configuration plus one entry per run.
#[derive(Debug, Serialize)]
pub struct ReportDoc<'a> {
    pub config: &'a RunConfig,
    pub runs: &'a [StageReport],
}

pub fn simulate_all(cfg: &RunConfig, g: &CsrGraph) -> anyhow::Result<Vec<StageReport>> {
    plans_for(&cfg.pattern, cfg.semantics)?
        .into_iter()
        .map(|(label, plan)| {
            Ok(StageReport {
                stage: "custom".into(),
                label,
                report: run_one(g, &plan, cfg, &cfg.options)?,
            })
        })
        .collect()
}

/// Ladder stage names, in order.
pub const STAGES: [&str; 5] = ["baseline", "filter", "remap", "duplication", "stealing"];

/// Options for each ladder stage; each adds one optimization to the last.
/// Seed and sample ratio come from `base`.
pub fn ladder(base: &SimOptions) -> Vec<(&'static str, SimOptions)> {
    let mut opts = SimOptions {
        mapping: AddressMapping::Default,
        filter: false,
        duplication: DuplicationBudget::None,
        stealing: false,
        ..base.clone()
    };
    STAGES
        .iter()
        .map(|&stage| {
            match stage {
                "filter" => opts.filter = true,
                "remap" => opts.mapping = AddressMapping::LocalFirst,
                "duplication" => opts.duplication = DuplicationBudget::Auto,
                "stealing" => opts.stealing = true,
                _ => {}
            }
            (stage, opts.clone())
        })
        .collect()
}

/// Runs every ladder stage for every plan concurrently. Rows come back in
/// stage order, then plan order, whatever the thread schedule.
pub fn sweep(cfg: &RunConfig, g: &CsrGraph) -> anyhow::Result<Vec<StageReport>> {
    let plans = plans_for(&cfg.pattern, cfg.semantics)?;
    let stages = ladder(&cfg.options);
    let jobs: Vec<(&str, &SimOptions, &str, &LoopPlan)> = stages
        .iter()
        .flat_map(|(stage, opts)| plans.iter().map(move |(label, plan)| (*stage, opts, label.as_str(), plan)))
        .collect();
    let results: Vec<anyhow::Result<SimReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(_, opts, _, plan)| s.spawn(move || run_one(g, plan, cfg, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    jobs.iter()
        .zip(results)
        .map(|(&(stage, _, label, _), r)| {
            Ok(StageReport {
                stage: stage.to_string(),
                label: label.to_string(),
                report: r?,
            })
        })
        .collect()
}
