//! Per-unit execution/schedule tables and the per-channel stealing scheduler.
//!
//! Tables hold one loop index per nesting level. Level 0 indexes root vertex
//! ids directly and advances by the unit count, so each unit walks its own
//! round-robin residue class; deeper levels index the candidate list the
//! plan produces at that level and advance by one.
//!
//! `sched[l]` is the next unexplored sibling at level `l` under the context
//! `exec[..l]`, or `None` when level `l` has nothing left. Loading always
//! takes the deepest pending level, which makes the tables a depth-first
//! work stack that other units can split from the bottom.

use serde::{Deserialize, Serialize};

use crate::memory::{unit_of, PimTopology};

pub type Index = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitTables {
    pub exec: Vec<Option<Index>>,
    pub sched: Vec<Option<Index>>,
    /// Set when the tables hold a stolen task: levels up to and including
    /// this one carry a single index and never advance.
    pub pinned_level: Option<usize>,
}

/// Fresh tables for `unit_id`: its first root is its own id.
pub fn init_tables(unit_id: usize, depth: usize) -> UnitTables {
    let mut sched = vec![None; depth];
    sched[0] = Some(unit_id as Index);
    UnitTables {
        exec: vec![None; depth],
        sched,
        pinned_level: None,
    }
}

impl UnitTables {
    pub fn depth(&self) -> usize {
        self.exec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sched.iter().all(Option::is_none)
    }

    /// Moves the deepest pending index into the execution table. Returns
    /// the loaded level, or `None` when nothing is scheduled.
    pub fn load_task(&mut self) -> Option<usize> {
        let level = (0..self.depth()).rev().find(|&l| self.sched[l].is_some())?;
        self.exec[level] = self.sched[level];
        for e in &mut self.exec[level + 1..] {
            *e = None;
        }
        Some(level)
    }

    /// Advances `level` past the index just loaded. `level_len` is the size
    /// of the domain at that level (vertex count at level 0).
    pub fn update_schedule(&mut self, level: usize, level_len: usize, num_units: usize) {
        if self.pinned_level.is_some_and(|p| level <= p) {
            self.sched[level] = None;
            return;
        }
        let cur = self.exec[level].expect("update follows a load at this level");
        let next = cur as usize + stride(level, num_units);
        self.sched[level] = (next < level_len).then_some(next as Index);
    }

    /// Schedules the first candidate of `level` after a task at `level - 1`
    /// produced a non-empty candidate list.
    pub fn push_child(&mut self, level: usize) {
        self.sched[level] = Some(0);
    }
}

#[inline]
pub fn stride(level: usize, num_units: usize) -> usize {
    if level == 0 {
        num_units
    } else {
        1
    }
}

/// 2-bit unit state kept by the channel scheduler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitState {
    Idle = 0b00,
    Executing = 0b01,
    Stealing = 0b10,
    BeingStolen = 0b11,
}

impl UnitState {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Scheduler placed on one channel: state and related unit for each of the
/// channel's units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelScheduler {
    pub channel: usize,
    /// Units on this channel, ascending.
    pub units: Vec<usize>,
    pub state: Vec<UnitState>,
    pub related: Vec<Option<usize>>,
}

/// All channel schedulers of a stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedulers {
    pub channels: Vec<ChannelScheduler>,
    num_channels: usize,
}

impl Schedulers {
    pub fn new(topo: &PimTopology) -> Self {
        let channels = (0..topo.num_channels)
            .map(|c| {
                let units: Vec<usize> = (0..topo.num_units())
                    .filter(|&u| matches!(unit_of(u, topo), Ok((ch, _)) if ch == c))
                    .collect();
                ChannelScheduler {
                    channel: c,
                    state: vec![UnitState::Executing; units.len()],
                    related: vec![None; units.len()],
                    units,
                }
            })
            .collect();
        Schedulers {
            channels,
            num_channels: topo.num_channels,
        }
    }

    fn slot(&self, unit: usize) -> (usize, usize) {
        let c = unit % self.num_channels;
        (c, unit / self.num_channels)
    }

    pub fn state(&self, unit: usize) -> UnitState {
        let (c, i) = self.slot(unit);
        self.channels[c].state[i]
    }

    pub fn related(&self, unit: usize) -> Option<usize> {
        let (c, i) = self.slot(unit);
        self.channels[c].related[i]
    }

    pub fn set(&mut self, unit: usize, state: UnitState, related: Option<usize>) {
        let (c, i) = self.slot(unit);
        self.channels[c].state[i] = state;
        self.channels[c].related[i] = related;
    }

    pub fn any_executing(&self) -> bool {
        self.channels
            .iter()
            .any(|ch| ch.state.contains(&UnitState::Executing))
    }
}

/// First executing unit other than `thief` and not in `exclude`: the
/// thief's own channel first, then the following channels in order.
pub fn find_victim(thief: usize, scheds: &Schedulers, exclude: &[usize]) -> Option<usize> {
    let n = scheds.num_channels;
    let home = thief % n;
    (0..n)
        .map(|k| &scheds.channels[(home + k) % n])
        .flat_map(|ch| ch.units.iter().zip(&ch.state))
        .find(|&(&u, &s)| u != thief && s == UnitState::Executing && !exclude.contains(&u))
        .map(|(&u, _)| u)
}

/// Levels `0..stealable_levels(depth)` may be stolen. A task must still own
/// a nested loop: below that, a task is one set operation plus loop-body
/// steps, cheaper to run than the two-sided steal overhead. Level 0 is
/// always stealable.
pub fn stealable_levels(depth: usize) -> usize {
    depth.saturating_sub(2).max(1)
}

/// What moved during one steal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StolenTask {
    pub level: usize,
    /// Task descriptor as carried to the thief: the victim's context for
    /// levels below `level`, the stolen index at `level`, and index 0 for
    /// every deeper loop.
    pub payload: Vec<Index>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StealEvent {
    pub thief: usize,
    pub victim: usize,
    pub level: usize,
    pub cycles_charged: u64,
    pub at_cycle: u64,
}

/// Splits the shallowest pending index off `victim` into `thief`.
/// `level_lens[l]` is the victim's domain size at level `l`. Returns `None`
/// when the victim has nothing stealable (see [`stealable_levels`]). A
/// stolen task is not itself
/// stealable either, only the work it exposes below its pinned level;
/// otherwise a task could hop between units without ever running.
pub fn steal(
    thief: &mut UnitTables,
    victim: &mut UnitTables,
    level_lens: &[usize],
    num_units: usize,
) -> Option<StolenTask> {
    let depth = victim.depth();
    let first = victim.pinned_level.map_or(0, |p| p + 1);
    let level = (first..stealable_levels(depth)).find(|&l| victim.sched[l].is_some())?;
    let idx = victim.sched[level].expect("found above");

    let mut payload: Vec<Index> = Vec::with_capacity(depth);
    for l in 0..level {
        payload.push(victim.exec[l].expect("context levels are loaded"));
    }
    payload.push(idx);
    payload.resize(depth, 0);

    thief.exec = vec![None; depth];
    thief.exec[..level].copy_from_slice(&victim.exec[..level]);
    thief.sched = vec![None; depth];
    thief.sched[level] = Some(idx);
    thief.pinned_level = Some(level);

    let next = idx as usize + stride(level, num_units);
    victim.sched[level] = (next < level_lens[level]).then_some(next as Index);
    Some(StolenTask { level, payload })
}
