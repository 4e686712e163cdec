//! Command-line definitions and dispatch.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gpm_pim::graph;

use crate::config::{usage, Emit, GraphFormat, RunConfig, Switch, PATTERN_NAMES};
use crate::{report, run};

#[derive(Parser, Debug)]
#[command(name = "gpm-pim", version, about = "Graph pattern mining on a simulated HBM-PIM stack")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count pattern embeddings with the functional executor
    Count(RunArgs),
    /// Simulate one configuration and write a report
    Simulate(RunArgs),
    /// Run the optimization ladder (baseline, filter, remap, duplication, stealing)
    Sweep(RunArgs),
    /// Write a synthetic graph
    Gen(GenArgs),
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Flat `key = value` file applied before any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long, value_parser = PATTERN_NAMES)]
    pub pattern: Option<String>,
    #[arg(long, value_parser = ["induced", "noninduced"])]
    pub semantics: Option<String>,
    #[arg(long, value_parser = ["default", "local-first"])]
    pub mapping: Option<String>,
    #[arg(long, value_enum)]
    pub filter: Option<Switch>,
    /// none, auto, or a per-unit byte budget
    #[arg(long)]
    pub duplication: Option<String>,
    #[arg(long, value_enum)]
    pub stealing: Option<Switch>,
    /// Fraction of root vertices to simulate, in (0, 1]
    #[arg(long)]
    pub sample_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat `key = value` file of topology overrides
    #[arg(long)]
    pub topo: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GraphKind {
    Er,
    Skewed,
    Ring,
    Complete,
    Path,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    /// Edge probability (er)
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Hub clique size (skewed)
    #[arg(long, default_value_t = 16)]
    pub hub: usize,
    /// Neighbors per side (ring)
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GraphFormat::Edgelist)]
    pub format: GraphFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn opt<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(|x| x.to_string())
}

fn switch(s: Option<Switch>) -> Option<String> {
    s.map(|s| if bool::from(s) { "on" } else { "off" }.to_string())
}

/// Defaults, then `--config`, then individual flags.
pub fn resolve(args: &RunArgs, default_emit: Emit) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig {
        emit: default_emit,
        ..RunConfig::default()
    };
    if let Some(path) = &args.config {
        cfg.load_file(path)?;
    }
    let format = args.format.map(|f| match f {
        GraphFormat::Edgelist => "edgelist".to_string(),
        GraphFormat::Csr => "csr".to_string(),
    });
    let flags = [
        ("graph", args.graph.as_ref().map(|p| p.display().to_string())),
        ("format", format),
        ("pattern", args.pattern.clone()),
        ("semantics", args.semantics.clone()),
        ("mapping", args.mapping.clone()),
        ("filter", switch(args.filter)),
        ("duplication", args.duplication.clone()),
        ("stealing", switch(args.stealing)),
        ("sample_ratio", opt(&args.sample_ratio)),
        ("seed", opt(&args.seed)),
        ("topo", args.topo.as_ref().map(|p| p.display().to_string())),
        ("emit", opt(&args.emit)),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, runs: &[run::StageReport], stdout: &mut dyn Write) -> anyhow::Result<()> {
    let text = match cfg.emit {
        Emit::Json => report::to_json(cfg, runs),
        Emit::Csv => report::to_csv(runs),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<()> {
    match &cli.command {
        Command::Count(args) => {
            let cfg = resolve(args, Emit::Json)?;
            let g = run::load_graph(&cfg)?;
            let counts = run::count(&cfg, &g)?;
            if let [(_, c)] = counts.as_slice() {
                writeln!(stdout, "{c}")?;
            } else {
                for (label, c) in counts {
                    writeln!(stdout, "{label} {c}")?;
                }
            }
        }
        Command::Simulate(args) => {
            let cfg = resolve(args, Emit::Json)?;
            let g = run::load_graph(&cfg)?;
            let runs = run::simulate_all(&cfg, &g)?;
            for r in &runs {
                writeln!(stderr, "{}", report::summary(r))?;
            }
            emit(&cfg, &runs, stdout)?;
        }
        Command::Sweep(args) => {
            let cfg = resolve(args, Emit::Csv)?;
            let g = run::load_graph(&cfg)?;
            let runs = run::sweep(&cfg, &g)?;
            for r in &runs {
                writeln!(stderr, "{}", report::summary(r))?;
            }
            emit(&cfg, &runs, stdout)?;
        }
        Command::Gen(args) => generate(args, stdout)?,
    }
    Ok(())
}

fn generate(args: &GenArgs, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let g = match args.kind {
        GraphKind::Er => graph::gen_er_graph(args.n, args.p, args.seed).map_err(|e| usage(e.to_string()))?,
        GraphKind::Skewed => graph::gen_skewed_graph(args.n, args.hub, args.seed).map_err(|e| usage(e.to_string()))?,
        GraphKind::Ring => graph::ring_lattice(args.n, args.k),
        GraphKind::Complete => graph::complete_graph(args.n),
        GraphKind::Path => graph::path_graph(args.n),
    };
    let mut bytes = Vec::new();
    match args.format {
        GraphFormat::Edgelist => g.write_edge_list(&mut bytes)?,
        GraphFormat::Csr => g.write_csr(&mut bytes)?,
    }
    match &args.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(())
}
