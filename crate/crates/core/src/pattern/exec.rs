use serde::{Deserialize, Serialize};

use super::setops::{bounded_prefix_into, intersect_into, subtract_into};
use super::LoopPlan;
use crate::graph::{CsrGraph, VertexId};

/// Innermost loop-body executions attributed to each root vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkVector {
    pub per_root_work: Vec<u64>,
}

impl WorkVector {
    pub fn total(&self) -> u64 {
        self.per_root_work.iter().sum()
    }

    pub fn over(&self, roots: &[VertexId]) -> u64 {
        roots.iter().map(|&r| self.per_root_work[r as usize]).sum()
    }
}

/// Upper bound on the candidates at `level` given the vertices matched so
/// far, or `None` when the level is unrestricted.
#[inline]
pub fn level_bound(plan: &LoopPlan, level: usize, matched: &[VertexId]) -> Option<VertexId> {
    plan.upper_bound_levels(level)
        .iter()
        .map(|&j| matched[j])
        .min()
}

/// Evaluates one set expression over already-fetched lists: intersect the
/// positive lists, subtract the negative ones, keep ids below `bound`, and
/// drop ids already matched. Returns the number of elements touched.
pub fn combine_sets(
    positive: &[&[VertexId]],
    negative: &[&[VertexId]],
    bound: Option<VertexId>,
    matched: &[VertexId],
    out: &mut Vec<VertexId>,
    scratch: &mut Vec<VertexId>,
) -> u64 {
    out.clear();
    let mut steps = bounded_prefix_into(positive[0], bound, out);
    for list in positive[1..].iter().chain(negative.iter()).enumerate() {
        let (i, other) = list;
        scratch.clear();
        std::mem::swap(out, scratch);
        steps += if i + 1 < positive.len() {
            intersect_into(scratch, other, bound, out)
        } else {
            subtract_into(scratch, other, bound, out)
        };
    }
    if !matched.is_empty() && !out.is_empty() {
        steps += out.len() as u64;
        out.retain(|x| !matched.contains(x));
    }
    steps
}

/// Candidate list for `level` computed straight from the graph.
pub fn level_candidates(
    plan: &LoopPlan,
    g: &CsrGraph,
    matched: &[VertexId],
    level: usize,
    out: &mut Vec<VertexId>,
    scratch: &mut Vec<VertexId>,
) -> u64 {
    let expr = plan.set_expr(level);
    let pos: Vec<&[VertexId]> = expr
        .positive_sources
        .iter()
        .map(|&j| g.neighbors(matched[j]))
        .collect();
    let neg: Vec<&[VertexId]> = expr
        .negative_sources
        .iter()
        .map(|&j| g.neighbors(matched[j]))
        .collect();
    let bound = level_bound(plan, level, matched);
    combine_sets(&pos, &neg, bound, &matched[..level], out, scratch)
}

struct Walker<'a> {
    plan: &'a LoopPlan,
    g: &'a CsrGraph,
    matched: Vec<VertexId>,
    cands: Vec<Vec<VertexId>>,
    scratch: Vec<VertexId>,
}

impl Walker<'_> {
    /// Embeddings below the current partial match, which covers levels `..level`.
    fn descend(&mut self, level: usize) -> u64 {
        let depth = self.plan.depth();
        let mut cands = std::mem::take(&mut self.cands[level]);
        level_candidates(
            self.plan,
            self.g,
            &self.matched[..level],
            level,
            &mut cands,
            &mut self.scratch,
        );
        let found = if level + 1 == depth {
            cands.len() as u64
        } else {
            let mut total = 0;
            for &v in &cands {
                self.matched.push(v);
                total += self.descend(level + 1);
                self.matched.pop();
            }
            total
        };
        self.cands[level] = cands;
        found
    }
}

/// Functional nested-loop executor. Counts embeddings rooted at `roots`
/// (all vertices when `None`) and records per-root innermost iterations.
pub fn reference_count(
    plan: &LoopPlan,
    g: &CsrGraph,
    roots: Option<&[VertexId]>,
) -> (u64, WorkVector) {
    let n = g.num_vertices();
    let mut work = WorkVector {
        per_root_work: vec![0; n],
    };
    let mut walker = Walker {
        plan,
        g,
        matched: Vec::with_capacity(plan.depth()),
        cands: vec![Vec::new(); plan.depth()],
        scratch: Vec::new(),
    };
    let mut visit = |root: VertexId| {
        walker.matched.clear();
        walker.matched.push(root);
        let found = if plan.depth() == 1 { 1 } else { walker.descend(1) };
        work.per_root_work[root as usize] += found;
    };
    match roots {
        Some(rs) => rs.iter().for_each(|&r| visit(r)),
        None => (0..n as VertexId).for_each(&mut visit),
    }
    (work.total(), work)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph};
    use crate::pattern::{builtin_pattern, compile_plan, Semantics};

    fn plan(name: &str, s: Semantics) -> LoopPlan {
        compile_plan(&builtin_pattern(name).unwrap(), s).unwrap()
    }

    #[test]
    fn closed_forms() {
        let k4 = complete_graph(4);
        assert_eq!(reference_count(&plan("3cc", Semantics::NonInduced), &k4, None).0, 4);
        assert_eq!(
            reference_count(&plan("4cc", Semantics::NonInduced), &complete_graph(5), None).0,
            5
        );
        assert_eq!(reference_count(&plan("wedge", Semantics::Induced), &path_graph(3), None).0, 1);
        assert_eq!(reference_count(&plan("4cl", Semantics::NonInduced), &k4, None).0, 3);
        assert_eq!(reference_count(&plan("4cl", Semantics::Induced), &k4, None).0, 0);
        assert_eq!(reference_count(&plan("4di", Semantics::NonInduced), &k4, None).0, 6);
    }

    #[test]
    fn triangle_work_vector_on_k4() {
        let (count, work) = reference_count(&plan("3cc", Semantics::NonInduced), &complete_graph(4), None);
        assert_eq!(count, 4);
        assert_eq!(work.per_root_work, vec![0, 0, 1, 3]);
    }

    #[test]
    fn root_subsets_sum() {
        let g = crate::graph::gen_er_graph(30, 0.3, 9).unwrap();
        let p = plan("4di", Semantics::Induced);
        let (full, wfull) = reference_count(&p, &g, None);
        let evens: Vec<VertexId> = (0..30).step_by(2).collect();
        let odds: Vec<VertexId> = (1..30).step_by(2).collect();
        let (a, wa) = reference_count(&p, &g, Some(&evens));
        let (b, _) = reference_count(&p, &g, Some(&odds));
        assert_eq!(a + b, full);
        assert_eq!(wa.over(&evens), a);
        assert_eq!(wfull.over(&evens), a);
    }

    #[test]
    fn combine_drops_matched_vertices() {
        let mut out = Vec::new();
        let mut scratch = Vec::new();
        combine_sets(&[&[1, 2, 3, 4]], &[], None, &[2, 9], &mut out, &mut scratch);
        assert_eq!(out, vec![1, 3, 4]);
        combine_sets(&[&[1, 2, 3, 4], &[2, 3, 4]], &[&[3]], Some(4), &[], &mut out, &mut scratch);
        assert_eq!(out, vec![2]);
    }
}
