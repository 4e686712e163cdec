//! Pattern enumeration: patterns, matching plans with symmetry-breaking
//! restrictions, a reference nested-loop executor, and a brute-force oracle.

mod exec;
mod oracle;
mod plan;
pub mod setops;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exec::{combine_sets, level_bound, level_candidates, reference_count, WorkVector};
pub use oracle::{oracle_count, oracle_raw_maps, ORACLE_MAX_VERTICES};
pub use plan::{compile_plan, compile_plan_unchecked, LoopPlan, Restriction, SetExpr};
pub use setops::{bounded_intersect, bounded_subtract};

/// Largest pattern the engine accepts.
pub const MAX_PATTERN_SIZE: usize = 6;

/// Whether pattern non-edges must also be absent in the match.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Induced,
    #[serde(rename = "noninduced")]
    NonInduced,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Induced => "induced",
            Semantics::NonInduced => "noninduced",
        })
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(Semantics::Induced),
            "noninduced" | "non_induced" | "non-induced" => Ok(Semantics::NonInduced),
            other => Err(Error::InvalidArgument(format!("unknown semantics `{other}`"))),
        }
    }
}

/// A small connected, unlabeled pattern graph. Row `i` of `adjacency` is a
/// bitmask of the neighbors of pattern vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    name: String,
    adjacency: Vec<u8>,
}

impl Pattern {
    pub fn from_edges(name: &str, k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if !(2..=MAX_PATTERN_SIZE).contains(&k) {
            return Err(Error::InvalidPattern(format!(
                "{k} vertices; supported sizes are 2..={MAX_PATTERN_SIZE}"
            )));
        }
        let mut adjacency = vec![0u8; k];
        for &(a, b) in edges {
            if a >= k || b >= k || a == b {
                return Err(Error::InvalidPattern(format!("bad edge ({a},{b})")));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        let p = Pattern {
            name: name.to_string(),
            adjacency,
        };
        if !p.is_connected() {
            return Err(Error::InvalidPattern(format!("`{name}` is not connected")));
        }
        Ok(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a] & (1 << b) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones() as usize
    }

    pub fn num_edges(&self) -> usize {
        (0..self.size()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.size()).map(|v| self.degree(v)).collect()
    }

    fn is_connected(&self) -> bool {
        let mut seen = 1u8;
        let mut frontier = 1u8;
        while frontier != 0 {
            let mut next = 0u8;
            for v in 0..self.size() {
                if frontier & (1 << v) != 0 {
                    next |= self.adjacency[v];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.size()
    }

    /// The same pattern with vertices renumbered so that old vertex
    /// `order[i]` becomes vertex `i`.
    pub fn reordered(&self, order: &[usize]) -> Pattern {
        let k = self.size();
        let mut adjacency = vec![0u8; k];
        for i in 0..k {
            for j in 0..k {
                if self.has_edge(order[i], order[j]) {
                    adjacency[i] |= 1 << j;
                }
            }
        }
        Pattern {
            name: self.name.clone(),
            adjacency,
        }
    }
}

/// Names accepted by [`builtin_pattern`].
pub const BUILTIN_PATTERNS: [&str; 6] = ["3cc", "wedge", "4cc", "5cc", "4di", "4cl"];

/// Triangle, wedge, 4- and 5-clique, diamond, and 4-cycle.
pub fn builtin_pattern(name: &str) -> Result<Pattern> {
    let clique = |k: usize| -> Vec<(usize, usize)> {
        (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
    };
    match name {
        "3cc" => Pattern::from_edges(name, 3, &clique(3)),
        "wedge" => Pattern::from_edges(name, 3, &[(0, 1), (1, 2)]),
        "4cc" => Pattern::from_edges(name, 4, &clique(4)),
        "5cc" => Pattern::from_edges(name, 5, &clique(5)),
        "4di" => Pattern::from_edges(name, 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
        "4cl" => Pattern::from_edges(name, 4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
        other => Err(Error::UnknownPattern(other.to_string())),
    }
}

/// Every vertex permutation `p` with `adj[p[i]][p[j]] == adj[i][j]`, found
/// by brute force over all `k!` candidates. The identity comes first.
pub fn automorphisms(p: &Pattern) -> Vec<Vec<usize>> {
    let k = p.size();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn extend(
        p: &Pattern,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = perm.len();
        if i == p.size() {
            out.push(perm.clone());
            return;
        }
        for c in 0..p.size() {
            if used[c] || p.degree(c) != p.degree(i) {
                continue;
            }
            if (0..i).all(|j| p.has_edge(i, j) == p.has_edge(c, perm[j])) {
                used[c] = true;
                perm.push(c);
                extend(p, perm, used, out);
                perm.pop();
                used[c] = false;
            }
        }
    }
    extend(p, &mut perm, &mut used, &mut out);
    out
}
