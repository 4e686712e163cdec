//! Compressed sparse row graphs: ingestion, validation, degree ordering and
//! synthetic generators.
//!
//! Every [`CsrGraph`] handed out by this module is simple and undirected:
//! adjacency lists are strictly ascending, free of self-loops, and symmetric.

use std::collections::BTreeSet;
use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex identifier. Graphs are limited to `u32::MAX` vertices.
pub type VertexId = u32;

/// Immutable CSR graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsrGraph {
    row_ptr: Vec<u64>,
    col_idx: Vec<VertexId>,
    max_degree: usize,
}

/// A vertex permutation together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeRelabeling {
    pub old_to_new: Vec<VertexId>,
    pub new_to_old: Vec<VertexId>,
}

impl CsrGraph {
    /// Builds a graph from raw CSR arrays, checking every invariant.
    pub fn from_csr(row_ptr: Vec<u64>, col_idx: Vec<VertexId>) -> Result<Self> {
        if row_ptr.is_empty() {
            return Err(Error::InvalidGraph("row_ptr must hold at least one entry".into()));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidGraph("row_ptr[0] must be 0".into()));
        }
        let n = row_ptr.len() - 1;
        if n > VertexId::MAX as usize {
            return Err(Error::InvalidGraph(format!("{n} vertices exceed the id range")));
        }
        for (v, w) in row_ptr.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::InvalidGraph(format!(
                    "row_ptr is not monotone at vertex {v} ({} > {})",
                    w[0], w[1]
                )));
            }
        }
        if row_ptr[n] != col_idx.len() as u64 {
            return Err(Error::InvalidGraph(format!(
                "row_ptr[n] = {} but {} column entries present",
                row_ptr[n],
                col_idx.len()
            )));
        }
        let g = CsrGraph {
            max_degree: 0,
            row_ptr,
            col_idx,
        };
        let mut max_degree = 0;
        for v in 0..n as VertexId {
            let nbrs = g.neighbors(v);
            max_degree = max_degree.max(nbrs.len());
            for (i, &u) in nbrs.iter().enumerate() {
                if u as usize >= n {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} lists neighbor {u} but n = {n}"
                    )));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop on vertex {v}")));
                }
                if i > 0 && nbrs[i - 1] >= u {
                    return Err(Error::InvalidGraph(format!(
                        "neighbors of {v} are not strictly ascending"
                    )));
                }
            }
        }
        for v in 0..n as VertexId {
            for &u in g.neighbors(v) {
                if g.neighbors(u).binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric adjacency: {u} in N({v}) but {v} not in N({u})"
                    )));
                }
            }
        }
        Ok(CsrGraph { max_degree, ..g })
    }

    /// Builds a simple undirected graph from an edge iterator. Self-loops and
    /// duplicates are dropped; `n` fixes the vertex count.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b {
                continue;
            }
            assert!((a as usize) < n && (b as usize) < n, "edge ({a},{b}) out of range");
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(mut adj: Vec<Vec<VertexId>>) -> Self {
        let mut row_ptr = Vec::with_capacity(adj.len() + 1);
        let mut col_idx = Vec::new();
        let mut max_degree = 0;
        row_ptr.push(0);
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            max_degree = max_degree.max(list.len());
            col_idx.extend_from_slice(list);
            row_ptr.push(col_idx.len() as u64);
        }
        CsrGraph {
            row_ptr,
            col_idx,
            max_degree,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Directed edge slots, twice the undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.col_idx.len()
    }

    pub fn num_undirected_edges(&self) -> usize {
        self.col_idx.len() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn row_ptr(&self) -> &[u64] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[VertexId] {
        &self.col_idx
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.col_idx[self.row_ptr[v] as usize..self.row_ptr[v + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        (self.row_ptr[v + 1] - self.row_ptr[v]) as usize
    }

    #[inline]
    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_vertices() as VertexId).map(|v| self.degree(v)).collect()
    }

    /// True when degree(v) >= degree(v + 1) for every v.
    pub fn is_degree_ordered(&self) -> bool {
        self.row_ptr
            .windows(3)
            .all(|w| w[1] - w[0] >= w[2] - w[1])
    }

    /// Neighbor-list payload in bytes at 4 bytes per id.
    pub fn list_bytes(&self, v: VertexId) -> u64 {
        4 * self.degree(v) as u64
    }

    pub fn total_list_bytes(&self) -> u64 {
        4 * self.num_edges() as u64
    }

    /// Writes the little-endian CSR layout read by [`load_csr_binary`].
    pub fn write_csr<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.num_vertices() as u64).to_le_bytes())?;
        for &p in &self.row_ptr {
            out.write_all(&p.to_le_bytes())?;
        }
        for &c in &self.col_idx {
            out.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_csr_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(8 * (self.row_ptr.len() + 1) + 4 * self.col_idx.len());
        self.write_csr(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Writes one `a b` line per undirected edge with `a < b`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for v in 0..self.num_vertices() as VertexId {
            for &u in self.neighbors(v) {
                if v < u {
                    writeln!(out, "{v} {u}")?;
                }
            }
        }
        Ok(())
    }

    /// Relabels vertices so that degrees are non-increasing in id.
    pub fn normalize_degree_order(&self) -> (CsrGraph, DegreeRelabeling) {
        let n = self.num_vertices();
        let mut new_to_old: Vec<VertexId> = (0..n as VertexId).collect();
        // stable sort keeps ascending original id among equal degrees
        new_to_old.sort_by_key(|&v| std::cmp::Reverse(self.degree(v)));
        let mut old_to_new = vec![0; n];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old as usize] = new as VertexId;
        }
        let adj = new_to_old
            .iter()
            .map(|&old| {
                self.neighbors(old)
                    .iter()
                    .map(|&u| old_to_new[u as usize])
                    .collect::<Vec<_>>()
            })
            .collect();
        (
            Self::from_adjacency(adj),
            DegreeRelabeling {
                old_to_new,
                new_to_old,
            },
        )
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are skipped. Vertex ids are compacted to `[0, n)` in order
/// of ascending original id.
pub fn load_edge_list<R: BufRead>(input: R) -> Result<CsrGraph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected two vertex ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("`{tok}` is not a vertex id"),
            })
        };
        let a = next_id()?;
        let b = next_id()?;
        raw.push((a, b));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ids: BTreeSet<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    if ids.len() > VertexId::MAX as usize {
        return Err(Error::InvalidGraph("too many distinct vertex ids".into()));
    }
    let sorted: Vec<u64> = ids.into_iter().collect();
    let rank = |x: u64| sorted.binary_search(&x).expect("id collected above") as VertexId;
    Ok(CsrGraph::from_edges(
        sorted.len(),
        raw.into_iter().map(|(a, b)| (rank(a), rank(b))),
    ))
}

/// Reads the binary CSR layout: `u64 n`, `n + 1` `u64` row offsets, then
/// `row_ptr[n]` `u32` column ids, all little-endian.
pub fn load_csr_binary<R: Read>(mut input: R) -> Result<CsrGraph> {
    fn read_u64<R: Read>(r: &mut R, what: &str) -> Result<u64> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)
            .map_err(|_| Error::Truncated(what.to_string()))?;
        Ok(u64::from_le_bytes(b))
    }
    let n = read_u64(&mut input, "vertex count")?;
    if n > VertexId::MAX as u64 {
        return Err(Error::InvalidGraph(format!("{n} vertices exceed the id range")));
    }
    let mut row_ptr = Vec::with_capacity(n as usize + 1);
    for _ in 0..=n {
        row_ptr.push(read_u64(&mut input, "row_ptr")?);
    }
    let m = *row_ptr.last().expect("n + 1 >= 1 entries");
    // reject nonsense before trying to allocate it
    if row_ptr.windows(2).any(|w| w[1] < w[0]) || row_ptr[0] != 0 {
        return CsrGraph::from_csr(row_ptr, Vec::new());
    }
    let mut bytes = Vec::new();
    input.take(4 * m).read_to_end(&mut bytes)?;
    if bytes.len() as u64 != 4 * m {
        return Err(Error::Truncated("col_idx".into()));
    }
    let col_idx = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    CsrGraph::from_csr(row_ptr, col_idx)
}

/// Erdős–Rényi G(n, p), returned in degree order.
pub fn gen_er_graph(n: usize, p: f64, seed: u64) -> Result<CsrGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n as VertexId {
        for b in a + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Ok(CsrGraph::from_edges(n, edges).normalize_degree_order().0)
}

/// A hub attached to a clique of `hub_degree` vertices, plus a sparse random
/// tail in which every vertex links to two uniformly chosen earlier vertices.
/// The clique concentrates most dense-pattern work on a handful of roots.
pub fn gen_skewed_graph(n: usize, hub_degree: usize, seed: u64) -> Result<CsrGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if hub_degree >= n {
        return Err(Error::InvalidArgument(format!(
            "hub_degree {hub_degree} must be below n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    // community: vertices 0..=hub_degree, fully connected
    for a in 0..=hub_degree as VertexId {
        for b in a + 1..=hub_degree as VertexId {
            edges.push((a, b));
        }
    }
    for v in 1..n as VertexId {
        for _ in 0..2 {
            let u = rng.gen_range(0..v);
            edges.push((u, v));
        }
    }
    Ok(CsrGraph::from_edges(n, edges).normalize_degree_order().0)
}

/// Complete graph K_n.
pub fn complete_graph(n: usize) -> CsrGraph {
    let edges = (0..n as VertexId).flat_map(|a| (a + 1..n as VertexId).map(move |b| (a, b)));
    CsrGraph::from_edges(n, edges)
}

/// Path on `n` vertices.
pub fn path_graph(n: usize) -> CsrGraph {
    CsrGraph::from_edges(n, (1..n as VertexId).map(|v| (v - 1, v)))
}

/// Circulant graph: every vertex joined to the `k` nearest on each side of a ring.
pub fn ring_lattice(n: usize, k: usize) -> CsrGraph {
    let edges = (0..n).flat_map(|v| (1..=k).map(move |d| (v as VertexId, ((v + d) % n) as VertexId)));
    CsrGraph::from_edges(n, edges)
}
