//! Event-driven execution of a loop plan on every PIM unit.
//!
//! One run is a single deterministic loop: the unit with the smallest local
//! clock (lowest id on ties) executes its next task. A task binds one loop
//! index, fetches the neighbor lists its child level needs, evaluates the
//! set expression, and schedules the children. Costs are charged as
//! `compute_cycles_per_element` per element touched in set operations, plus
//! one tiered memory request per bank touched by a list fetch, plus filter
//! and stealing overheads.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::memory::{
    access_cost, classify_access, filter_stream, AccessTier, AddressMapping, BankTable, FilterSpec,
    PimTopology, ID_BYTES,
};
use crate::pattern::{combine_sets, level_bound, reference_count, LoopPlan, WorkVector};
use crate::placement::{DuplicationBudget, Placement};
use crate::steal::{find_victim, init_tables, steal, Schedulers, StealEvent, UnitState, UnitTables};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOptions {
    pub mapping: AddressMapping,
    pub filter: bool,
    pub duplication: DuplicationBudget,
    pub stealing: bool,
    pub sample_ratio: f64,
    pub seed: u64,
    /// Record every executed loop iteration and steal for offline checks.
    #[serde(skip)]
    pub instrument: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            mapping: AddressMapping::Default,
            filter: false,
            duplication: DuplicationBudget::None,
            stealing: false,
            sample_ratio: 1.0,
            seed: 0,
            instrument: false,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_ratio > 0.0 && self.sample_ratio <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sample ratio {} must lie in (0, 1]",
                self.sample_ratio
            )));
        }
        Ok(())
    }
}

/// Per-tier tallies, indexed like [`AccessTier::ALL`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierTally {
    pub near: u64,
    pub intra: u64,
    pub inter: u64,
}

impl TierTally {
    pub fn add(&mut self, tier: AccessTier, n: u64) {
        match tier {
            AccessTier::NearCore => self.near += n,
            AccessTier::IntraChannel => self.intra += n,
            AccessTier::InterChannel => self.inter += n,
        }
    }

    pub fn total(&self) -> u64 {
        self.near + self.intra + self.inter
    }

    /// Fractions `[near, intra, inter]`; all zero for an empty tally.
    pub fn fractions(&self) -> [f64; 3] {
        let t = self.total();
        if t == 0 {
            return [0.0; 3];
        }
        let t = t as f64;
        [self.near as f64 / t, self.intra as f64 / t, self.inter as f64 / t]
    }
}

/// Counters accumulated during a run, before any ratios are taken.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCounters {
    /// Blocks read from memory per tier.
    pub accesses: TierTally,
    /// Bytes moved to the requesting unit per tier.
    pub bytes: TierTally,
    pub transferred_blocks: u64,
    pub filtered_payload_blocks: u64,
    /// Bytes the same fetches would have moved without the filter.
    pub unfiltered_bytes: u64,
    pub filter_cycles: u64,
    pub compute_cycles: u64,
    pub memory_cycles: u64,
    pub per_unit_busy: Vec<u64>,
    pub per_unit_finish: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedMetrics {
    pub tier_fractions: [f64; 3],
    pub local_access_ratio: f64,
    pub filtered_ratio: f64,
    pub exe_cycles: u64,
    pub avg_cycles: f64,
    pub exe_avg_ratio: f64,
}

/// Ratios over a finished run. Exe/Avg is the latest unit finish time over
/// the mean unit busy time.
pub fn derive_metrics(raw: &RawCounters) -> DerivedMetrics {
    let tier_fractions = raw.accesses.fractions();
    let moved = raw.filtered_payload_blocks + raw.transferred_blocks;
    let filtered_ratio = if moved == 0 {
        0.0
    } else {
        raw.filtered_payload_blocks as f64 / moved as f64
    };
    let exe_cycles = raw.per_unit_finish.iter().copied().max().unwrap_or(0);
    let avg_cycles = if raw.per_unit_busy.is_empty() {
        0.0
    } else {
        raw.per_unit_busy.iter().sum::<u64>() as f64 / raw.per_unit_busy.len() as f64
    };
    let exe_avg_ratio = if avg_cycles > 0.0 {
        exe_cycles as f64 / avg_cycles
    } else {
        1.0
    };
    DerivedMetrics {
        tier_fractions,
        // no accesses at all: nothing was remote
        local_access_ratio: if raw.accesses.total() == 0 { 1.0 } else { tier_fractions[0] },
        filtered_ratio,
        exe_cycles,
        avg_cycles,
        exe_avg_ratio,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub pattern: String,
    pub semantics: String,
    pub pattern_count: u64,
    pub num_units: usize,
    pub per_unit_cycles: Vec<u64>,
    pub per_unit_finish: Vec<u64>,
    pub exe_cycles: u64,
    pub avg_cycles: f64,
    pub exe_avg_ratio: f64,
    pub exe_seconds: f64,
    pub compute_cycles: u64,
    pub memory_cycles: u64,
    pub tier_accesses: TierTally,
    pub tier_bytes: TierTally,
    pub tier_fractions: [f64; 3],
    pub local_access_ratio: f64,
    pub transferred_blocks: u64,
    pub filtered_payload_blocks: u64,
    pub unfiltered_bytes: u64,
    pub filtered_ratio: f64,
    pub filter_cycles: u64,
    pub steal_events: u64,
    pub steal_histogram: Vec<u64>,
    pub failed_steal_probes: u64,
    pub steal_protocol_violations: u64,
    pub dup_boundary: VertexId,
    pub duplicated_bytes: u64,
    pub duplication_copy_cycles: u64,
    pub bytes_used: Vec<u64>,
    pub sampled_roots: usize,
    pub work_ratio_r: f64,
    pub estimated_exe_cycles: Option<u64>,
    /// Iteration log and steal log; only filled when instrumented.
    #[serde(skip)]
    pub trace: Option<SimTrace>,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Byte tallies plus bytes saved by the filter equal the unfiltered total.
    pub fn conserves_bytes(&self, topo: &PimTopology) -> bool {
        self.tier_bytes.total() + self.filtered_payload_blocks * topo.block_bytes == self.unfiltered_bytes
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimTrace {
    /// Matched vertex prefix of every executed loop iteration.
    pub iterations: Vec<Vec<VertexId>>,
    pub steals: Vec<StealEvent>,
}

/// Every `round(1 / ratio)`-th vertex id starting at 0.
pub fn sample_roots(n: usize, ratio: f64) -> Vec<VertexId> {
    let stride = (1.0 / ratio).round().max(1.0) as usize;
    (0..n).step_by(stride).map(|v| v as VertexId).collect()
}

/// Share of the full run's work that the sampled roots cover.
pub fn work_ratio(full: &WorkVector, sampled: &[VertexId], sample_ratio: f64) -> f64 {
    let total = full.total();
    if total == 0 {
        return sample_ratio;
    }
    full.over(sampled) as f64 / total as f64
}

/// `sample / r`, rounded to the nearest cycle.
pub fn estimate_full_cycles(sample_cycles: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("work ratio {r} must lie in (0, 1]")));
    }
    Ok(sample_cycles / r)
}

struct Unit {
    tables: UnitTables,
    matched: Vec<VertexId>,
    /// `cands[l]`: candidate list for level `l` under `exec[..l]`.
    cands: Vec<Vec<VertexId>>,
    clock: u64,
    busy: u64,
    finish: u64,
    count: u64,
    done: bool,
    /// Pending context rebuild after a steal: next level to bind, and the
    /// stolen level. One level per event, so every memory request is
    /// issued at the current simulated time.
    rebuild: Option<(usize, usize)>,
}

struct Engine<'a> {
    g: &'a CsrGraph,
    plan: &'a LoopPlan,
    topo: &'a PimTopology,
    placement: &'a Placement,
    opts: &'a SimOptions,
    root_mask: Vec<bool>,
    banks: BankTable,
    raw: RawCounters,
    scratch: Vec<VertexId>,
    trace: Option<SimTrace>,
}

impl Engine<'_> {
    /// Issues all block requests for `N(v)` at `now`; returns completion time.
    fn fetch_list(&mut self, unit: usize, v: VertexId, bound: Option<VertexId>, now: u64) -> Result<u64> {
        let list = self.g.neighbors(v);
        if list.is_empty() {
            return Ok(now);
        }
        let topo = self.topo;
        let per_block = (topo.block_bytes / ID_BYTES) as usize;
        let base = self.placement.list_address(unit, v);
        let nblocks = topo.blocks_for_ids(list.len());
        // group the list's blocks by the bank that serves them
        let mut groups: Vec<(usize, crate::memory::Location, Vec<u64>)> = Vec::new();
        for k in 0..nblocks {
            let loc = self.opts.mapping.decode(base + k, topo)?;
            let bank = loc.bank_index(topo);
            match groups.iter_mut().find(|g| g.0 == bank) {
                Some(g) => g.2.push(k),
                None => groups.push((bank, loc, vec![k])),
            }
        }
        let mut done = now;
        let mut values: Vec<VertexId> = Vec::new();
        for (_, loc, blocks) in &groups {
            let tier = classify_access(unit, loc, topo);
            let group_blocks = blocks.len() as u64;
            let mut sent = group_blocks;
            let mut fcycles = 0;
            if let (true, Some(th), false) = (self.opts.filter, bound, tier == AccessTier::NearCore) {
                values.clear();
                for &k in blocks {
                    let lo = k as usize * per_block;
                    let hi = (lo + per_block).min(list.len());
                    values.extend_from_slice(&list[lo..hi]);
                }
                let out = filter_stream(&values, FilterSpec::below(th), topo)?;
                debug_assert!(out.kept.iter().all(|&x| x < th));
                fcycles = out.filter_cycles;
                sent = group_blocks - out.payload_blocks_saved;
                self.raw.filtered_payload_blocks += out.payload_blocks_saved;
                self.raw.filter_cycles += fcycles;
            }
            self.raw.accesses.add(tier, group_blocks);
            self.raw.bytes.add(tier, sent * topo.block_bytes);
            self.raw.transferred_blocks += sent;
            self.raw.unfiltered_bytes += group_blocks * topo.block_bytes;
            let service = topo.lat_near + group_blocks - 1;
            let grant = self.banks.bank_ready(loc, topo, now, service);
            done = done.max(grant + fcycles + access_cost(tier, sent, topo));
        }
        Ok(done)
    }

    /// Builds `cands[level]` for `unit`'s current matches; returns the cycles spent.
    fn expand(&mut self, u: &mut Unit, uid: usize, level: usize) -> Result<u64> {
        let now = u.clock;
        let bound = level_bound(self.plan, level, &u.matched);
        let expr = self.plan.set_expr(level);
        let mut mem_done = now;
        for &j in expr.positive_sources.iter().chain(&expr.negative_sources) {
            mem_done = mem_done.max(self.fetch_list(uid, u.matched[j], bound, now)?);
        }
        let pos: Vec<&[VertexId]> = expr
            .positive_sources
            .iter()
            .map(|&j| self.g.neighbors(u.matched[j]))
            .collect();
        let neg: Vec<&[VertexId]> = expr
            .negative_sources
            .iter()
            .map(|&j| self.g.neighbors(u.matched[j]))
            .collect();
        let steps = combine_sets(
            &pos,
            &neg,
            bound,
            &u.matched[..level],
            &mut u.cands[level],
            &mut self.scratch,
        );
        let compute = steps * self.topo.compute_cycles_per_element;
        self.raw.compute_cycles += compute;
        self.raw.memory_cycles += mem_done - now;
        Ok(mem_done - now + compute)
    }

    /// Moves a pending level-0 index past roots outside the sample.
    fn skip_unsampled(&self, t: &mut UnitTables, units: usize) {
        while let Some(r) = t.sched[0] {
            if self.root_mask[r as usize] {
                break;
            }
            let next = r as usize + units;
            t.sched[0] = (next < self.root_mask.len()).then_some(next as u32);
        }
    }

    fn level_len(&self, u: &Unit, level: usize) -> usize {
        if level == 0 {
            self.g.num_vertices()
        } else {
            u.cands[level].len()
        }
    }

    /// Binds the loaded index at `level` and expands the next level.
    fn run_task(&mut self, u: &mut Unit, uid: usize, level: usize) -> Result<u64> {
        let depth = self.plan.depth();
        let idx = u.tables.exec[level].expect("loaded") as usize;
        let v = if level == 0 {
            if !self.root_mask[idx] {
                return Ok(0);
            }
            idx as VertexId
        } else {
            u.cands[level][idx]
        };
        u.matched.truncate(level);
        u.matched.push(v);
        if let Some(t) = self.trace.as_mut() {
            t.iterations.push(u.matched.clone());
        }
        if level + 1 == depth {
            u.count += 1;
            let c = self.topo.compute_cycles_per_element;
            self.raw.compute_cycles += c;
            return Ok(c);
        }
        let cost = self.expand(u, uid, level + 1)?;
        if !u.cands[level + 1].is_empty() {
            u.tables.push_child(level + 1);
        }
        Ok(cost)
    }

    /// Rebuilds one level of a stolen context: binds `exec[l]` and expands
    /// level `l + 1`. Returns the cycles spent.
    fn rebuild_step(&mut self, u: &mut Unit, uid: usize, l: usize) -> Result<u64> {
        let idx = u.tables.exec[l].expect("stolen context") as usize;
        let v = if l == 0 { idx as VertexId } else { u.cands[l][idx] };
        u.matched.truncate(l);
        u.matched.push(v);
        self.expand(u, uid, l + 1)
    }
}

/// Runs `plan` over `g` on the modeled stack.
pub fn simulate(
    g: &CsrGraph,
    plan: &LoopPlan,
    topo: &PimTopology,
    placement: &Placement,
    opts: &SimOptions,
) -> Result<SimReport> {
    topo.validate()?;
    opts.validate()?;
    if placement.num_units() != topo.num_units() {
        return Err(Error::PlacementMismatch(format!(
            "{} units placed, topology has {}",
            placement.num_units(),
            topo.num_units()
        )));
    }
    if placement.num_vertices() != g.num_vertices() {
        return Err(Error::PlacementMismatch(format!(
            "placement covers {} vertices, graph has {}",
            placement.num_vertices(),
            g.num_vertices()
        )));
    }
    if placement.mapping_kind != opts.mapping {
        return Err(Error::PlacementMismatch(format!(
            "placement uses {} mapping, options ask for {}",
            placement.mapping_kind, opts.mapping
        )));
    }

    let n = g.num_vertices();
    let units = topo.num_units();
    let depth = plan.depth();
    let roots = sample_roots(n, opts.sample_ratio);
    let mut root_mask = vec![false; n];
    for &r in &roots {
        root_mask[r as usize] = true;
    }

    let mut engine = Engine {
        g,
        plan,
        topo,
        placement,
        opts,
        root_mask,
        banks: BankTable::new(topo),
        raw: RawCounters {
            per_unit_busy: vec![0; units],
            per_unit_finish: vec![0; units],
            ..RawCounters::default()
        },
        scratch: Vec::new(),
        trace: opts.instrument.then(SimTrace::default),
    };
    let mut pool: Vec<Unit> = (0..units)
        .map(|uid| {
            let mut tables = init_tables(uid, depth);
            if uid >= n {
                tables.sched[0] = None;
            }
            Unit {
                tables,
                matched: Vec::with_capacity(depth),
                cands: vec![Vec::new(); depth],
                clock: 0,
                busy: 0,
                finish: 0,
                count: 0,
                done: false,
                rebuild: None,
            }
        })
        .collect();
    for u in &mut pool {
        engine.skip_unsampled(&mut u.tables, units);
    }
    let mut scheds = Schedulers::new(topo);
    let mut histogram = vec![0u64; depth];
    let mut steal_events = 0u64;
    let mut failed_probes = 0u64;
    let mut violations = 0u64;

    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..units).map(|u| Reverse((0, u))).collect();
    while let Some(Reverse((at, uid))) = heap.pop() {
        if pool[uid].done || at != pool[uid].clock {
            continue;
        }
        let mut u = std::mem::replace(&mut pool[uid], placeholder());
        if let Some((l, target)) = u.rebuild {
            let cost = engine.rebuild_step(&mut u, uid, l)?;
            u.rebuild = (l + 1 < target).then_some((l + 1, target));
            u.clock += cost;
            u.busy += cost;
            u.finish = u.clock;
            heap.push(Reverse((u.clock, uid)));
            pool[uid] = u;
            continue;
        }
        if let Some(level) = u.tables.load_task() {
            let len = engine.level_len(&u, level);
            u.tables.update_schedule(level, len, units);
            engine.skip_unsampled(&mut u.tables, units);
            let cost = engine.run_task(&mut u, uid, level)?;
            u.clock += cost;
            u.busy += cost;
            if cost > 0 {
                u.finish = u.clock;
            }
            heap.push(Reverse((u.clock, uid)));
            pool[uid] = u;
            continue;
        }
        if !opts.stealing {
            u.done = true;
            scheds.set(uid, UnitState::Idle, None);
            pool[uid] = u;
            continue;
        }

        // out of work: look for a victim
        scheds.set(uid, UnitState::Stealing, None);
        let mut tried: Vec<usize> = Vec::new();
        let mut stolen = None;
        while tried.len() < units {
            let Some(vid) = find_victim(uid, &scheds, &tried) else { break };
            tried.push(vid);
            if scheds.state(vid) != UnitState::Executing || scheds.related(vid).is_some() {
                violations += 1;
                continue;
            }
            scheds.set(uid, UnitState::Stealing, Some(vid));
            scheds.set(vid, UnitState::BeingStolen, Some(uid));
            let victim = &mut pool[vid];
            let lens: Vec<usize> = (0..depth).map(|l| engine.level_len(victim, l)).collect();
            let took = steal(&mut u.tables, &mut victim.tables, &lens, units);
            engine.skip_unsampled(&mut victim.tables, units);
            scheds.set(vid, UnitState::Executing, None);
            match took {
                Some(task) => {
                    stolen = Some((vid, task));
                    break;
                }
                None => {
                    failed_probes += 1;
                    scheds.set(uid, UnitState::Stealing, None);
                }
            }
        }
        match stolen {
            Some((vid, task)) => {
                let overhead = topo.steal_overhead;
                let event = StealEvent {
                    thief: uid,
                    victim: vid,
                    level: task.level,
                    cycles_charged: overhead,
                    at_cycle: u.clock,
                };
                steal_events += 1;
                histogram[task.level] += 1;
                if let Some(t) = engine.trace.as_mut() {
                    t.steals.push(event);
                }
                let victim = &mut pool[vid];
                victim.clock += overhead;
                victim.busy += overhead;
                victim.finish = victim.finish.max(victim.clock);
                heap.push(Reverse((victim.clock, vid)));

                scheds.set(uid, UnitState::Executing, None);
                u.clock += overhead;
                u.busy += overhead;
                u.matched.clear();
                u.rebuild = (task.level > 0).then_some((0, task.level));
                u.finish = u.clock;
                heap.push(Reverse((u.clock, uid)));
            }
            None if scheds.any_executing() => {
                // someone may still expose work; poll again later
                scheds.set(uid, UnitState::Stealing, None);
                u.clock += topo.lat_inter;
                heap.push(Reverse((u.clock, uid)));
            }
            None => {
                u.done = true;
                scheds.set(uid, UnitState::Idle, None);
            }
        }
        pool[uid] = u;
    }

    let pattern_count: u64 = pool.iter().map(|u| u.count).sum();
    engine.raw.per_unit_busy = pool.iter().map(|u| u.busy).collect();
    engine.raw.per_unit_finish = pool.iter().map(|u| u.finish).collect();
    let m = derive_metrics(&engine.raw);

    let (work_ratio_r, estimated) = if opts.sample_ratio < 1.0 {
        let (_, full) = reference_count(plan, g, None);
        let r = work_ratio(&full, &roots, opts.sample_ratio);
        let est = estimate_full_cycles(m.exe_cycles as f64, r)?.round() as u64;
        (r, Some(est))
    } else {
        (1.0, None)
    };

    let raw = engine.raw;
    Ok(SimReport {
        pattern: plan.pattern().name().to_string(),
        semantics: plan.semantics().to_string(),
        pattern_count,
        num_units: units,
        per_unit_cycles: raw.per_unit_busy.clone(),
        per_unit_finish: raw.per_unit_finish.clone(),
        exe_cycles: m.exe_cycles,
        avg_cycles: m.avg_cycles,
        exe_avg_ratio: m.exe_avg_ratio,
        exe_seconds: topo.cycles_to_seconds(m.exe_cycles),
        compute_cycles: raw.compute_cycles,
        memory_cycles: raw.memory_cycles,
        tier_accesses: raw.accesses,
        tier_bytes: raw.bytes,
        tier_fractions: m.tier_fractions,
        local_access_ratio: m.local_access_ratio,
        transferred_blocks: raw.transferred_blocks,
        filtered_payload_blocks: raw.filtered_payload_blocks,
        unfiltered_bytes: raw.unfiltered_bytes,
        filtered_ratio: m.filtered_ratio,
        filter_cycles: raw.filter_cycles,
        steal_events,
        steal_histogram: histogram,
        failed_steal_probes: failed_probes,
        steal_protocol_violations: violations,
        dup_boundary: placement.dup_boundary.iter().copied().min().unwrap_or(0),
        duplicated_bytes: placement.duplicated_bytes,
        duplication_copy_cycles: placement.copy_cycles,
        bytes_used: placement.bytes_used.clone(),
        sampled_roots: roots.len(),
        work_ratio_r,
        estimated_exe_cycles: estimated,
        trace: engine.trace,
    })
}

fn placeholder() -> Unit {
    Unit {
        tables: init_tables(0, 1),
        matched: Vec::new(),
        cands: Vec::new(),
        clock: 0,
        busy: 0,
        finish: 0,
        count: 0,
        done: true,
        rebuild: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, gen_er_graph};
    use crate::pattern::{builtin_pattern, compile_plan, Semantics};

    fn run(g: &CsrGraph, name: &str, topo: &PimTopology, opts: &SimOptions) -> SimReport {
        let plan = compile_plan(&builtin_pattern(name).unwrap(), Semantics::NonInduced).unwrap();
        let p = Placement::for_options(g, topo, opts).unwrap();
        simulate(g, &plan, topo, &p, opts).unwrap()
    }

    #[test]
    fn metrics_from_counters() {
        let raw = RawCounters {
            accesses: TierTally { near: 1, intra: 1, inter: 2 },
            filtered_payload_blocks: 1,
            transferred_blocks: 3,
            per_unit_busy: vec![10, 30],
            per_unit_finish: vec![12, 40],
            ..RawCounters::default()
        };
        let m = derive_metrics(&raw);
        assert_eq!(m.tier_fractions, [0.25, 0.25, 0.5]);
        assert_eq!(m.filtered_ratio, 0.25);
        assert_eq!(m.exe_cycles, 40);
        assert_eq!(m.avg_cycles, 20.0);
        assert_eq!(m.exe_avg_ratio, 2.0);
        let empty = derive_metrics(&RawCounters::default());
        assert_eq!((empty.filtered_ratio, empty.exe_cycles), (0.0, 0));
        assert_eq!(empty.local_access_ratio, 1.0);
    }

    #[test]
    fn strided_sampling() {
        assert_eq!(sample_roots(10, 0.5), vec![0, 2, 4, 6, 8]);
        assert_eq!(sample_roots(10, 0.1), vec![0]);
        assert_eq!(sample_roots(4, 1.0), vec![0, 1, 2, 3]);
        assert_eq!(sample_roots(7, 0.3), vec![0, 3, 6]);
    }

    #[test]
    fn work_ratio_and_estimate() {
        let full = WorkVector {
            per_root_work: vec![0, 0, 1, 3],
        };
        assert_eq!(work_ratio(&full, &[0, 2], 0.5), 0.25);
        assert_eq!(estimate_full_cycles(100.0, 0.25).unwrap(), 400.0);
        assert_eq!(estimate_full_cycles(77.0, 1.0).unwrap(), 77.0);
        let e = estimate_full_cycles(3.69e-2, 0.103).unwrap();
        assert!((e - 0.358).abs() < 1e-3);
        assert!(estimate_full_cycles(1.0, 0.0).is_err());
        assert!(estimate_full_cycles(1.0, -0.5).is_err());
    }

    #[test]
    fn counts_match_reference() {
        let topo = PimTopology::small(2, 2);
        let g = gen_er_graph(40, 0.3, 3).unwrap();
        for name in ["3cc", "4cc", "4di", "4cl"] {
            let plan = compile_plan(&builtin_pattern(name).unwrap(), Semantics::NonInduced).unwrap();
            let (want, _) = reference_count(&plan, &g, None);
            for stealing in [false, true] {
                let opts = SimOptions {
                    stealing,
                    filter: true,
                    ..SimOptions::default()
                };
                let r = run(&g, name, &topo, &opts);
                assert_eq!(r.pattern_count, want, "{name} stealing={stealing}");
                assert!(r.conserves_bytes(&topo));
                assert_eq!(r.steal_protocol_violations, 0);
            }
        }
    }

    #[test]
    fn rejects_mismatched_placement() {
        let topo = PimTopology::small(2, 2);
        let g = complete_graph(5);
        let plan = compile_plan(&builtin_pattern("3cc").unwrap(), Semantics::NonInduced).unwrap();
        let p = Placement::for_options(&g, &topo, &SimOptions::default()).unwrap();
        let opts = SimOptions {
            mapping: AddressMapping::LocalFirst,
            ..SimOptions::default()
        };
        assert!(matches!(
            simulate(&g, &plan, &topo, &p, &opts),
            Err(Error::PlacementMismatch(_))
        ));
        let other = PimTopology::small(1, 2);
        assert!(simulate(&g, &plan, &other, &p, &SimOptions::default()).is_err());
        let bad = SimOptions {
            sample_ratio: 0.0,
            ..SimOptions::default()
        };
        assert!(simulate(&g, &plan, &topo, &p, &bad).is_err());
    }

    #[test]
    fn sampled_run_reports_estimate() {
        let topo = PimTopology::small(2, 2);
        let g = gen_er_graph(60, 0.2, 5).unwrap();
        let opts = SimOptions {
            sample_ratio: 0.5,
            ..SimOptions::default()
        };
        let r = run(&g, "3cc", &topo, &opts);
        assert_eq!(r.sampled_roots, 30);
        assert!(r.work_ratio_r > 0.0 && r.work_ratio_r <= 1.0);
        let est = r.estimated_exe_cycles.unwrap() as f64;
        assert!((est - r.exe_cycles as f64 / r.work_ratio_r).abs() <= 0.5);
    }
}
