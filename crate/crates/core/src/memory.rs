//! HBM-PIM geometry: address mappings, access tiers and their latencies, the
//! in-bank conditional access filter, and per-bank request serialization.
//!
//! Fidelity is tier-level. Row, column and bank-within-group bits collapse
//! into [`Location::block_offset`]; DRAM row timing is not modeled.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Bytes per vertex id in neighbor lists.
pub const ID_BYTES: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PimTopology {
    pub num_channels: usize,
    /// One PIM unit per bank group.
    pub bank_groups_per_channel: usize,
    pub banks_per_channel: usize,
    pub block_bytes: u64,
    pub capacity_bytes: u64,
    pub lat_near: u64,
    pub lat_intra: u64,
    pub lat_inter: u64,
    pub filter_setup: u64,
    pub filters_per_bank_group: u64,
    pub steal_overhead: u64,
    pub compute_cycles_per_element: u64,
    pub bank_serialization: bool,
    pub clock_mhz: u64,
}

impl Default for PimTopology {
    fn default() -> Self {
        PimTopology {
            num_channels: 32,
            bank_groups_per_channel: 4,
            banks_per_channel: 8,
            block_bytes: 32,
            capacity_bytes: 4 << 30,
            lat_near: 10,
            lat_intra: 40,
            lat_inter: 140,
            filter_setup: 2,
            filters_per_bank_group: 2,
            steal_overhead: 280,
            compute_cycles_per_element: 1,
            bank_serialization: true,
            clock_mhz: 250,
        }
    }
}

impl PimTopology {
    /// Default latencies on a reduced grid of `channels x bank_groups` units.
    pub fn small(channels: usize, bank_groups: usize) -> Self {
        PimTopology {
            num_channels: channels,
            bank_groups_per_channel: bank_groups,
            banks_per_channel: 2 * bank_groups,
            capacity_bytes: 64 << 20,
            ..Self::default()
        }
    }

    pub fn num_units(&self) -> usize {
        self.num_channels * self.bank_groups_per_channel
    }

    pub fn banks_per_group(&self) -> usize {
        self.banks_per_channel / self.bank_groups_per_channel
    }

    pub fn num_banks(&self) -> usize {
        self.num_channels * self.banks_per_channel
    }

    pub fn capacity_blocks(&self) -> u64 {
        self.capacity_bytes / self.block_bytes
    }

    pub fn unit_capacity_bytes(&self) -> u64 {
        self.capacity_bytes / self.num_units() as u64
    }

    /// Blocks needed to carry `ids` vertex ids.
    pub fn blocks_for_ids(&self, ids: usize) -> u64 {
        (ids as u64 * ID_BYTES).div_ceil(self.block_bytes)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTopology(m));
        let counts = [
            ("num_channels", self.num_channels as u64),
            ("bank_groups_per_channel", self.bank_groups_per_channel as u64),
            ("banks_per_channel", self.banks_per_channel as u64),
            ("block_bytes", self.block_bytes),
            ("capacity_bytes", self.capacity_bytes),
            ("filters_per_bank_group", self.filters_per_bank_group),
            ("clock_mhz", self.clock_mhz),
        ];
        for (name, v) in counts {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !self.banks_per_channel.is_multiple_of(self.bank_groups_per_channel) {
            return bad("banks_per_channel must be a multiple of bank_groups_per_channel".into());
        }
        if !self.block_bytes.is_multiple_of(ID_BYTES) {
            return bad("block_bytes must hold whole vertex ids".into());
        }
        if !(self.lat_near <= self.lat_intra && self.lat_intra <= self.lat_inter) {
            return bad("latencies must satisfy near <= intra <= inter".into());
        }
        let stripe = (self.num_banks() as u64) * self.block_bytes;
        if !self.capacity_bytes.is_multiple_of(stripe) {
            return bad(format!("capacity_bytes must be a multiple of {stripe}"));
        }
        Ok(())
    }

    pub fn cycles_to_seconds(&self, cycles: u64) -> f64 {
        cycles as f64 / (self.clock_mhz as f64 * 1e6)
    }
}

/// Physical placement of one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Location {
    pub channel: usize,
    pub bank_group: usize,
    /// Bank within the bank group.
    pub bank: usize,
    pub unit: usize,
    pub block_offset: u64,
}

impl Location {
    /// Dense bank index in `[0, num_banks)`.
    pub fn bank_index(&self, topo: &PimTopology) -> usize {
        self.channel * topo.banks_per_channel + self.bank_group * topo.banks_per_group() + self.bank
    }
}

/// Unit ids fill channels first, then bank groups within a channel.
pub fn unit_of(unit_id: usize, topo: &PimTopology) -> Result<(usize, usize)> {
    if unit_id >= topo.num_units() {
        return Err(Error::OutOfRange {
            what: "unit",
            value: unit_id as u64,
            limit: topo.num_units() as u64,
        });
    }
    Ok((unit_id % topo.num_channels, unit_id / topo.num_channels))
}

pub fn unit_id(channel: usize, bank_group: usize, topo: &PimTopology) -> usize {
    bank_group * topo.num_channels + channel
}

fn check_block(block_addr: u64, topo: &PimTopology) -> Result<()> {
    if block_addr >= topo.capacity_blocks() {
        return Err(Error::OutOfRange {
            what: "block address",
            value: block_addr,
            limit: topo.capacity_blocks(),
        });
    }
    Ok(())
}

/// Channel-interleaved mapping: consecutive blocks go to different channels,
/// then to banks within a group, then to bank groups.
pub fn decode_default(block_addr: u64, topo: &PimTopology) -> Result<Location> {
    check_block(block_addr, topo)?;
    let c = topo.num_channels as u64;
    let bpg = topo.banks_per_group() as u64;
    let g = topo.bank_groups_per_channel as u64;
    let channel = (block_addr % c) as usize;
    let bank = ((block_addr / c) % bpg) as usize;
    let bank_group = ((block_addr / (c * bpg)) % g) as usize;
    Ok(Location {
        channel,
        bank_group,
        bank,
        unit: unit_id(channel, bank_group, topo),
        block_offset: block_addr / (c * bpg * g),
    })
}

/// Local-first mapping: each unit owns one contiguous region; inside it,
/// blocks stripe across that unit's own banks.
pub fn decode_local_first(block_addr: u64, topo: &PimTopology) -> Result<Location> {
    check_block(block_addr, topo)?;
    let region = topo.capacity_blocks() / topo.num_units() as u64;
    let unit = (block_addr / region) as usize;
    let off = block_addr % region;
    let bpg = topo.banks_per_group() as u64;
    let (channel, bank_group) = unit_of(unit, topo)?;
    Ok(Location {
        channel,
        bank_group,
        bank: (off % bpg) as usize,
        unit,
        block_offset: off / bpg,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AddressMapping {
    #[default]
    Default,
    LocalFirst,
}

impl AddressMapping {
    pub fn decode(self, block_addr: u64, topo: &PimTopology) -> Result<Location> {
        match self {
            AddressMapping::Default => decode_default(block_addr, topo),
            AddressMapping::LocalFirst => decode_local_first(block_addr, topo),
        }
    }
}

impl fmt::Display for AddressMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AddressMapping::Default => "default",
            AddressMapping::LocalFirst => "local-first",
        })
    }
}

impl FromStr for AddressMapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(AddressMapping::Default),
            "local-first" | "local_first" => Ok(AddressMapping::LocalFirst),
            other => Err(Error::InvalidArgument(format!("unknown mapping `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessTier {
    NearCore,
    IntraChannel,
    InterChannel,
}

impl AccessTier {
    pub const ALL: [AccessTier; 3] = [
        AccessTier::NearCore,
        AccessTier::IntraChannel,
        AccessTier::InterChannel,
    ];

    pub fn latency(self, topo: &PimTopology) -> u64 {
        match self {
            AccessTier::NearCore => topo.lat_near,
            AccessTier::IntraChannel => topo.lat_intra,
            AccessTier::InterChannel => topo.lat_inter,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

pub fn classify_access(requester: usize, target: &Location, topo: &PimTopology) -> AccessTier {
    let (channel, _) = unit_of(requester, topo).expect("requester unit in range");
    if target.unit == requester {
        AccessTier::NearCore
    } else if target.channel == channel {
        AccessTier::IntraChannel
    } else {
        AccessTier::InterChannel
    }
}

/// Tier latency for the first block plus one cycle per further block.
pub fn access_cost(tier: AccessTier, n_blocks: u64, topo: &PimTopology) -> u64 {
    tier.latency(topo) + n_blocks.max(1) - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Cmp {
    #[inline]
    pub fn holds(self, x: VertexId, th: VertexId) -> bool {
        match self {
            Cmp::Lt => x < th,
            Cmp::Le => x <= th,
            Cmp::Gt => x > th,
            Cmp::Ge => x >= th,
        }
    }
}

/// Comparison registers loaded into a bank's filter with a request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub cmp: Cmp,
    pub th: VertexId,
    pub enabled: bool,
}

impl FilterSpec {
    pub fn below(th: VertexId) -> Self {
        FilterSpec {
            cmp: Cmp::Lt,
            th,
            enabled: true,
        }
    }

    pub fn disabled() -> Self {
        FilterSpec {
            cmp: Cmp::Lt,
            th: 0,
            enabled: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterOutcome {
    pub kept: Vec<VertexId>,
    pub filter_cycles: u64,
    pub payload_blocks_saved: u64,
}

/// Streams `values` through the in-bank comparator. Throughput is
/// `filters_per_bank_group` ids per cycle after `filter_setup` cycles.
pub fn filter_stream(values: &[VertexId], spec: FilterSpec, topo: &PimTopology) -> Result<FilterOutcome> {
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "filter input must be strictly ascending".into(),
        ));
    }
    if !spec.enabled {
        return Ok(FilterOutcome {
            kept: values.to_vec(),
            filter_cycles: 0,
            payload_blocks_saved: 0,
        });
    }
    let kept: Vec<VertexId> = values.iter().copied().filter(|&v| spec.cmp.holds(v, spec.th)).collect();
    let filter_cycles =
        topo.filter_setup + (values.len() as u64).div_ceil(topo.filters_per_bank_group);
    let payload_blocks_saved = topo.blocks_for_ids(values.len()) - topo.blocks_for_ids(kept.len());
    Ok(FilterOutcome {
        kept,
        filter_cycles,
        payload_blocks_saved,
    })
}

/// Busy-until time per bank. Requests are granted first come, first served.
#[derive(Clone, Debug)]
pub struct BankTable {
    free_at: Vec<u64>,
    enabled: bool,
}

impl BankTable {
    pub fn new(topo: &PimTopology) -> Self {
        BankTable {
            free_at: vec![0; topo.num_banks()],
            enabled: topo.bank_serialization,
        }
    }

    /// Grant cycle for a request arriving at `arrival` that occupies the bank
    /// for `service` cycles.
    pub fn bank_ready(&mut self, target: &Location, topo: &PimTopology, arrival: u64, service: u64) -> u64 {
        if !self.enabled {
            return arrival;
        }
        let slot = &mut self.free_at[target.bank_index(topo)];
        let grant = arrival.max(*slot);
        *slot = grant + service;
        grant
    }
}
