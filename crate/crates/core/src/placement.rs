//! Neighbor-list placement across PIM units: round-robin ownership plus
//! replication of the highest-degree lists into every unit's free memory.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::memory::{access_cost, classify_access, AddressMapping, PimTopology};
use crate::sim::SimOptions;

/// How much free memory each unit may spend on replicated lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DuplicationBudget {
    #[default]
    None,
    Auto,
    Bytes(u64),
}

impl fmt::Display for DuplicationBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DuplicationBudget::None => f.write_str("none"),
            DuplicationBudget::Auto => f.write_str("auto"),
            DuplicationBudget::Bytes(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for DuplicationBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DuplicationBudget::None),
            "auto" => Ok(DuplicationBudget::Auto),
            other => other
                .parse::<u64>()
                .map(DuplicationBudget::Bytes)
                .map_err(|_| Error::InvalidArgument(format!("bad duplication budget `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    num_units: usize,
    pub mapping_kind: AddressMapping,
    /// First non-replicated vertex id, per unit.
    pub dup_boundary: Vec<VertexId>,
    /// Payload bytes stored per unit (4 bytes per id, unaligned).
    pub bytes_used: Vec<u64>,
    /// Block address of each vertex's primary copy.
    list_block: Vec<u64>,
    /// Block offset of each replicated list inside a unit's replica area.
    dup_offset: Vec<u64>,
    /// Start block of each unit's replica area.
    dup_base: Vec<u64>,
    /// Aligned blocks consumed per unit.
    blocks_used: Vec<u64>,
    pub duplicated_bytes: u64,
    /// One-time replication traffic, reported but never charged to kernels.
    pub copy_cycles: u64,
}

impl Placement {
    pub fn num_units(&self) -> usize {
        self.num_units
    }

    pub fn num_vertices(&self) -> usize {
        self.list_block.len()
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> usize {
        v as usize % self.num_units
    }

    /// Where `requester` reads `N(v)` from, and whether that copy is local.
    #[inline]
    pub fn resolve_owner(&self, requester: usize, v: VertexId) -> (usize, bool) {
        if v < self.dup_boundary[requester] {
            (requester, true)
        } else {
            let o = self.owner(v);
            (o, o == requester)
        }
    }

    /// Start block of the copy of `N(v)` that `requester` reads.
    #[inline]
    pub fn list_address(&self, requester: usize, v: VertexId) -> u64 {
        if v < self.dup_boundary[requester] {
            self.dup_base[requester] + self.dup_offset[v as usize]
        } else {
            self.list_block[v as usize]
        }
    }

    /// Round-robin placement followed by replication under `opts`.
    pub fn for_options(g: &CsrGraph, topo: &PimTopology, opts: &SimOptions) -> Result<Placement> {
        let base = place_round_robin(g, topo, opts.mapping)?;
        let budget = match opts.duplication {
            DuplicationBudget::None => return Ok(base),
            DuplicationBudget::Auto => auto_budget(&base, g, topo),
            DuplicationBudget::Bytes(b) => b,
        };
        let vb = duplication_boundary(g, budget);
        apply_duplication(&base, g, topo, vb)
    }
}

/// `N(v)` goes to unit `v mod num_units`. Lists are block-aligned and
/// packed in id order: within each unit's region under the local-first
/// mapping, and as one shared array under the default interleaved mapping,
/// where a per-unit region would not be local anyway and would only make
/// every region start on the same bank.
pub fn place_round_robin(g: &CsrGraph, topo: &PimTopology, mapping: AddressMapping) -> Result<Placement> {
    topo.validate()?;
    let units = topo.num_units();
    let region = topo.capacity_blocks() / units as u64;
    let mut bytes_used = vec![0u64; units];
    let mut blocks_used = vec![0u64; units];
    let mut list_block = Vec::with_capacity(g.num_vertices());
    let mut shared = 0u64;
    for v in 0..g.num_vertices() as VertexId {
        let u = v as usize % units;
        let blocks = topo.blocks_for_ids(g.degree(v));
        list_block.push(match mapping {
            AddressMapping::LocalFirst => u as u64 * region + blocks_used[u],
            AddressMapping::Default => shared,
        });
        shared += blocks;
        blocks_used[u] += blocks;
        bytes_used[u] += g.list_bytes(v);
    }
    if let Some(u) = (0..units).find(|&u| blocks_used[u] > region) {
        return Err(Error::BudgetExceeded {
            unit: u,
            needed: blocks_used[u] * topo.block_bytes,
            available: region * topo.block_bytes,
        });
    }
    Ok(Placement {
        num_units: units,
        mapping_kind: mapping,
        dup_boundary: vec![0; units],
        bytes_used,
        list_block,
        dup_offset: vec![0; g.num_vertices()],
        dup_base: match mapping {
            AddressMapping::LocalFirst => blocks_used
                .iter()
                .enumerate()
                .map(|(u, &b)| u as u64 * region + b)
                .collect(),
            AddressMapping::Default => vec![shared; units],
        },
        blocks_used,
        duplicated_bytes: 0,
        copy_cycles: 0,
    })
}

/// Longest id-order prefix whose neighbor lists fit in `free_bytes`.
/// Stops at the first list that does not fit.
pub fn duplication_boundary(g: &CsrGraph, free_bytes: u64) -> VertexId {
    let sizes = (0..g.num_vertices() as VertexId).map(|v| g.list_bytes(v));
    greedy_prefix(sizes, free_bytes) as VertexId
}

/// Number of leading `sizes` whose running total stays within `budget`.
pub fn greedy_prefix(sizes: impl IntoIterator<Item = u64>, budget: u64) -> usize {
    let mut used = 0u64;
    let mut count = 0;
    for need in sizes {
        if used + need > budget {
            break;
        }
        used += need;
        count += 1;
    }
    count
}

/// `(capacity - graph bytes) / units`, capped by the tightest unit's
/// remaining region so that the result is always applicable.
pub fn auto_budget(p: &Placement, g: &CsrGraph, topo: &PimTopology) -> u64 {
    let spread = topo.capacity_bytes.saturating_sub(g.total_list_bytes()) / topo.num_units() as u64;
    let region = topo.unit_capacity_bytes();
    let tightest = p
        .blocks_used
        .iter()
        .map(|&b| region.saturating_sub(b * topo.block_bytes))
        .min()
        .unwrap_or(0);
    // aligned copies take up to one extra block per list
    let slack = g.num_vertices() as u64 * topo.block_bytes;
    spread.min(tightest.saturating_sub(slack))
}

/// Replicates `N(0) .. N(vb - 1)` into every unit.
pub fn apply_duplication(p: &Placement, g: &CsrGraph, topo: &PimTopology, vb: VertexId) -> Result<Placement> {
    if vb as usize > g.num_vertices() {
        return Err(Error::OutOfRange {
            what: "duplication boundary",
            value: vb as u64,
            limit: g.num_vertices() as u64,
        });
    }
    if p.num_units != topo.num_units() || p.num_vertices() != g.num_vertices() {
        return Err(Error::PlacementMismatch("placement built for another graph or topology".into()));
    }
    if vb == 0 {
        return Ok(p.clone());
    }
    let region = topo.capacity_blocks() / topo.num_units() as u64;
    let mut out = p.clone();
    let mut offset = 0u64;
    let mut dup_bytes = 0u64;
    for v in 0..vb {
        out.dup_offset[v as usize] = offset;
        offset += topo.blocks_for_ids(g.degree(v));
        dup_bytes += g.list_bytes(v);
    }
    for u in 0..topo.num_units() {
        if out.blocks_used[u] + offset > region {
            return Err(Error::BudgetExceeded {
                unit: u,
                needed: offset * topo.block_bytes,
                available: (region - out.blocks_used[u]) * topo.block_bytes,
            });
        }
        if p.mapping_kind == AddressMapping::Default {
            // replica areas follow the shared list array back to back
            out.dup_base[u] = p.dup_base[u] + u as u64 * offset;
        }
        out.blocks_used[u] += offset;
        out.bytes_used[u] += dup_bytes;
        out.dup_boundary[u] = vb;
    }
    out.duplicated_bytes = dup_bytes * topo.num_units() as u64;
    let mut copy = 0u64;
    for u in 0..topo.num_units() {
        for v in 0..vb {
            let src = p.list_block[v as usize];
            let loc = p.mapping_kind.decode(src, topo)?;
            let tier = classify_access(u, &loc, topo);
            copy += access_cost(tier, topo.blocks_for_ids(g.degree(v)), topo);
        }
    }
    out.copy_cycles = copy;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, gen_er_graph};
    use proptest::prelude::*;

    fn topo(units_per_channel: usize, channels: usize) -> PimTopology {
        PimTopology::small(channels, units_per_channel)
    }

    #[test]
    fn round_robin_owners() {
        let g = gen_er_graph(5, 0.6, 1).unwrap();
        let t = topo(1, 2);
        let p = place_round_robin(&g, &t, AddressMapping::Default).unwrap();
        let owners: Vec<usize> = (0..5).map(|v| p.owner(v)).collect();
        assert_eq!(owners, vec![0, 1, 0, 1, 0]);
        assert_eq!(p.bytes_used.iter().sum::<u64>(), 4 * g.num_edges() as u64);
        assert!(p.dup_boundary.iter().all(|&b| b == 0));

        let g = gen_er_graph(128, 0.05, 1).unwrap();
        let p = place_round_robin(&g, &PimTopology::default(), AddressMapping::LocalFirst).unwrap();
        assert!((0..128).all(|v| p.owner(v) == v as usize));
    }

    #[test]
    fn greedy_prefix_examples() {
        assert_eq!(greedy_prefix([5, 4, 3, 2], 8), 1);
        assert_eq!(greedy_prefix([5, 4, 3, 2], 14), 4);
        assert_eq!(greedy_prefix([5, 4, 3, 2], 0), 0);
    }

    #[test]
    fn boundary_examples() {
        // degrees 5, 4, 3, 2 -> list bytes 20, 16, 12, 8; budget in bytes
        let g = CsrGraph::from_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (2, 3)],
        );
        assert_eq!(g.degrees()[..4], [5, 4, 3, 3]);
        assert_eq!(duplication_boundary(&g, 0), 0);
        assert_eq!(duplication_boundary(&g, 20), 1);
        assert_eq!(duplication_boundary(&g, 35), 1);
        assert_eq!(duplication_boundary(&g, 36), 2);
        assert_eq!(duplication_boundary(&g, g.total_list_bytes()), 6);
        assert_eq!(duplication_boundary(&g, u64::MAX / 2), 6);
    }

    #[test]
    fn full_duplication_makes_everything_local() {
        let g = complete_graph(5);
        let t = topo(1, 2);
        let base = place_round_robin(&g, &t, AddressMapping::LocalFirst).unwrap();
        let unchanged = apply_duplication(&base, &g, &t, 0).unwrap();
        assert_eq!(unchanged, base);
        let full = apply_duplication(&base, &g, &t, 5).unwrap();
        for u in 0..2 {
            assert_eq!(full.dup_boundary[u], 5);
            assert_eq!(full.bytes_used[u], base.bytes_used[u] + g.total_list_bytes());
            for v in 0..5 {
                assert_eq!(full.resolve_owner(u, v), (u, true));
            }
        }
        assert!(full.copy_cycles > 0);
    }

    #[test]
    fn resolve_rules() {
        let g = complete_graph(5);
        let t = topo(1, 2);
        let base = place_round_robin(&g, &t, AddressMapping::Default).unwrap();
        let p = apply_duplication(&base, &g, &t, 2).unwrap();
        assert_eq!(p.resolve_owner(1, 1), (1, true));
        assert_eq!(p.resolve_owner(1, 4), (0, false));
        assert_eq!(p.resolve_owner(0, 4), (0, true));
        assert_ne!(p.list_address(1, 1), p.list_address(0, 1));
    }

    #[test]
    fn budget_errors() {
        let g = complete_graph(40);
        let t = PimTopology {
            capacity_bytes: 16 * 1024,
            ..topo(1, 2)
        };
        let base = place_round_robin(&g, &t, AddressMapping::Default).unwrap();
        assert!(matches!(
            apply_duplication(&base, &g, &t, 40),
            Err(Error::BudgetExceeded { .. })
        ));
        let auto = auto_budget(&base, &g, &t);
        let vb = duplication_boundary(&g, auto);
        assert!(apply_duplication(&base, &g, &t, vb).is_ok());
    }

    proptest! {
        #[test]
        fn boundary_is_greedy_and_monotone(seed in 0u64..200, m in 0u64..4000, extra in 0u64..2000) {
            let g = gen_er_graph(30, 0.3, seed).unwrap();
            let vb = duplication_boundary(&g, m);
            prop_assert!(duplication_boundary(&g, m + extra) >= vb);
            let prefix: u64 = (0..vb).map(|v| g.list_bytes(v)).sum();
            prop_assert!(prefix <= m);
            if (vb as usize) < g.num_vertices() {
                prop_assert!(prefix + g.list_bytes(vb) > m);
            }
        }
    }
}
