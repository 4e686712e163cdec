//! Report emission.
//!
//! JSON output is `{"config": <resolved RunConfig>, "runs": [{"stage",
//! "label", "report"}]}`. CSV output has one row per run with the columns
//! in [`CSV_COLUMNS`]; fractions are plain decimals and an empty cell means
//! "not applicable" (the estimate without sampling).

use std::fmt::Write;

use crate::config::RunConfig;
use crate::run::{ReportDoc, StageReport};

pub const CSV_COLUMNS: [&str; 19] = [
    "stage",
    "pattern",
    "semantics",
    "pattern_count",
    "exe_cycles",
    "avg_cycles",
    "exe_avg_ratio",
    "near_fraction",
    "intra_fraction",
    "inter_fraction",
    "local_access_ratio",
    "filtered_ratio",
    "filtered_payload_blocks",
    "steal_events",
    "dup_boundary",
    "sampled_roots",
    "work_ratio_r",
    "estimated_exe_cycles",
    "exe_seconds",
];

pub fn to_json(cfg: &RunConfig, runs: &[StageReport]) -> String {
    let mut s = serde_json::to_string_pretty(&ReportDoc { config: cfg, runs }).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_csv(runs: &[StageReport]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for run in runs {
        let r = &run.report;
        let f = r.tier_fractions;
        let est = r.estimated_exe_cycles.map(|e| e.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            run.stage,
            run.label,
            r.semantics,
            r.pattern_count,
            r.exe_cycles,
            r.avg_cycles,
            r.exe_avg_ratio,
            f[0],
            f[1],
            f[2],
            r.local_access_ratio,
            r.filtered_ratio,
            r.filtered_payload_blocks,
            r.steal_events,
            r.dup_boundary,
            r.sampled_roots,
            r.work_ratio_r,
            est,
            r.exe_seconds,
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Short human-readable digest of a run.
pub fn summary(run: &StageReport) -> String {
    let r = &run.report;
    let f = r.tier_fractions;
    format!(
        "{} {}: count={} exe_cycles={} exe/avg={:.3} near/intra/inter={:.3}/{:.3}/{:.3}",
        run.stage, run.label, r.pattern_count, r.exe_cycles, r.exe_avg_ratio, f[0], f[1], f[2]
    )
}
