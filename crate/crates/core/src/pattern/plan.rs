use serde::{Deserialize, Serialize};

use super::{automorphisms, exec::reference_count, oracle::oracle_count, Pattern, Semantics};
use crate::error::{Error, Result};
use crate::graph::gen_er_graph;

/// Candidate set for one loop level: the intersection of the neighbor lists
/// of `positive_sources`, minus those of `negative_sources`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetExpr {
    pub level: usize,
    pub positive_sources: Vec<usize>,
    pub negative_sources: Vec<usize>,
}

/// `v[smaller] < v[larger]` on matched vertex ids. Levels are loop depths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Restriction {
    pub smaller: usize,
    pub larger: usize,
}

/// A compiled nested-loop matching schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopPlan {
    pattern: Pattern,
    semantics: Semantics,
    order: Vec<usize>,
    set_exprs: Vec<SetExpr>,
    restrictions: Vec<Restriction>,
    /// `upper_bounds[l]`: earlier levels whose matched id bounds level `l` from above.
    upper_bounds: Vec<Vec<usize>>,
}

impl LoopPlan {
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// `order[l]` is the pattern vertex matched at loop level `l`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn depth(&self) -> usize {
        self.order.len()
    }

    /// Set expression for `level`, which must be at least 1.
    pub fn set_expr(&self, level: usize) -> &SetExpr {
        &self.set_exprs[level - 1]
    }

    pub fn set_exprs(&self) -> &[SetExpr] {
        &self.set_exprs
    }

    pub fn restrictions(&self) -> &[Restriction] {
        &self.restrictions
    }

    pub fn upper_bound_levels(&self, level: usize) -> &[usize] {
        &self.upper_bounds[level]
    }

    /// True when any level carries a restriction that can drive the filter.
    pub fn has_restrictions(&self) -> bool {
        !self.restrictions.is_empty()
    }

    /// The plan with symmetry breaking switched off. Each embedding is then
    /// enumerated once per automorphism.
    pub fn without_restrictions(&self) -> LoopPlan {
        LoopPlan {
            restrictions: Vec::new(),
            upper_bounds: vec![Vec::new(); self.depth()],
            ..self.clone()
        }
    }
}

fn matching_order(p: &Pattern) -> Vec<usize> {
    let k = p.size();
    let first = (0..k)
        .max_by_key(|&v| (p.degree(v), std::cmp::Reverse(v)))
        .expect("pattern has vertices");
    let mut order = vec![first];
    while order.len() < k {
        let next = (0..k)
            .filter(|v| !order.contains(v))
            .filter(|&v| order.iter().any(|&u| p.has_edge(u, v)))
            .max_by_key(|&v| {
                let links = order.iter().filter(|&&u| p.has_edge(u, v)).count();
                (links, p.degree(v), std::cmp::Reverse(v))
            })
            .expect("connected pattern always has a frontier vertex");
        order.push(next);
    }
    order
}

/// Symmetry-breaking restrictions over loop levels. For each non-identity
/// automorphism, the smallest level `i` it moves gets `v[s(i)] < v[i]`;
/// transitively implied constraints are then dropped.
fn restrictions_for(levelled: &Pattern) -> Vec<Restriction> {
    let mut set: Vec<Restriction> = Vec::new();
    for sigma in automorphisms(levelled).iter().skip(1) {
        let i = (0..sigma.len())
            .find(|&i| sigma[i] != i)
            .expect("non-identity permutation moves a point");
        let r = Restriction {
            smaller: sigma[i],
            larger: i,
        };
        if !set.contains(&r) {
            set.push(r);
        }
    }
    let k = levelled.size();
    // reach[a][b]: a path a -> b of length >= 2 exists, edges being smaller -> larger
    let mut direct = vec![vec![false; k]; k];
    for r in &set {
        direct[r.smaller][r.larger] = true;
    }
    let mut closure = direct.clone();
    for m in 0..k {
        for a in 0..k {
            for b in 0..k {
                if closure[a][m] && closure[m][b] {
                    closure[a][b] = true;
                }
            }
        }
    }
    let implied = |r: &Restriction| {
        (0..k).any(|m| m != r.smaller && m != r.larger && closure[r.smaller][m] && closure[m][r.larger])
    };
    let mut kept: Vec<Restriction> = set.iter().copied().filter(|r| !implied(r)).collect();
    kept.sort_by_key(|r| (r.larger, r.smaller));
    kept
}

/// Compiles without the oracle cross-check. Exposed for tests and callers
/// that validate plans themselves.
pub fn compile_plan_unchecked(p: &Pattern, semantics: Semantics) -> LoopPlan {
    let order = matching_order(p);
    let levelled = p.reordered(&order);
    let k = p.size();
    let set_exprs = (1..k)
        .map(|level| {
            let (pos, neg): (Vec<usize>, Vec<usize>) =
                (0..level).partition(|&j| levelled.has_edge(j, level));
            SetExpr {
                level,
                positive_sources: pos,
                negative_sources: match semantics {
                    Semantics::Induced => neg,
                    Semantics::NonInduced => Vec::new(),
                },
            }
        })
        .collect();
    let restrictions = restrictions_for(&levelled);
    let mut upper_bounds = vec![Vec::new(); k];
    for r in &restrictions {
        debug_assert!(r.smaller > r.larger, "restrictions bound later levels by earlier ones");
        upper_bounds[r.smaller].push(r.larger);
    }
    LoopPlan {
        pattern: p.clone(),
        semantics,
        order,
        set_exprs,
        restrictions,
        upper_bounds,
    }
}

const VALIDATION_GRAPHS: u64 = 20;

/// Compiles `p` and checks the plan against the brute-force oracle on a
/// fixed family of small random graphs before returning it.
pub fn compile_plan(p: &Pattern, semantics: Semantics) -> Result<LoopPlan> {
    let plan = compile_plan_unchecked(p, semantics);
    for r in &plan.restrictions {
        if r.smaller <= r.larger {
            return Err(Error::PlanValidation(format!(
                "restriction v{} < v{} does not bound a later level",
                r.smaller, r.larger
            )));
        }
    }
    for i in 0..VALIDATION_GRAPHS {
        let n = 6 + (i as usize % 10);
        let prob = [0.2, 0.4, 0.6, 0.8][i as usize % 4];
        let g = gen_er_graph(n, prob, 0x5eed_0000 + i)?;
        let expect = oracle_count(p, &g, semantics)?;
        let (got, _) = reference_count(&plan, &g, None);
        if got != expect {
            return Err(Error::PlanValidation(format!(
                "{} ({semantics}): plan counts {got}, oracle {expect} on G({n}, {prob}) seed {i}",
                p.name()
            )));
        }
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{builtin_pattern, BUILTIN_PATTERNS};

    fn plan(name: &str, s: Semantics) -> LoopPlan {
        compile_plan(&builtin_pattern(name).unwrap(), s).unwrap()
    }

    fn r(smaller: usize, larger: usize) -> Restriction {
        Restriction { smaller, larger }
    }

    #[test]
    fn triangle_plan() {
        let p = plan("3cc", Semantics::NonInduced);
        assert_eq!(p.set_expr(1).positive_sources, vec![0]);
        assert_eq!(p.set_expr(2).positive_sources, vec![0, 1]);
        assert!(p.set_expr(2).negative_sources.is_empty());
        assert_eq!(p.restrictions(), &[r(1, 0), r(2, 1)]);
        assert_eq!(p.upper_bound_levels(2), &[1]);
    }

    #[test]
    fn induced_wedge_plan() {
        let p = plan("wedge", Semantics::Induced);
        // center first
        assert_eq!(p.order()[0], 1);
        assert_eq!(p.set_expr(2).positive_sources, vec![0]);
        assert_eq!(p.set_expr(2).negative_sources, vec![1]);
        assert_eq!(p.restrictions(), &[r(2, 1)]);
    }

    #[test]
    fn orders_start_at_max_degree_and_stay_connected() {
        for name in BUILTIN_PATTERNS {
            let pat = builtin_pattern(name).unwrap();
            let p = compile_plan_unchecked(&pat, Semantics::Induced);
            let maxdeg = pat.degrees().into_iter().max().unwrap();
            assert_eq!(pat.degree(p.order()[0]), maxdeg);
            for e in p.set_exprs() {
                assert!(!e.positive_sources.is_empty(), "{name} level {}", e.level);
                assert!(e.positive_sources.iter().all(|&j| j < e.level));
                assert!(e.negative_sources.iter().all(|&j| j < e.level));
            }
        }
    }

    #[test]
    fn restriction_relation_is_acyclic() {
        for name in BUILTIN_PATTERNS {
            for s in [Semantics::Induced, Semantics::NonInduced] {
                let p = plan(name, s);
                // every restriction points from a later level to an earlier one
                assert!(p.restrictions().iter().all(|r| r.smaller > r.larger));
            }
        }
    }

    #[test]
    fn clique_restrictions_form_a_chain() {
        let p = plan("5cc", Semantics::NonInduced);
        assert_eq!(p.restrictions(), &[r(1, 0), r(2, 1), r(3, 2), r(4, 3)]);
    }

    #[test]
    fn stripped_plan_has_no_bounds() {
        let p = plan("4cc", Semantics::NonInduced).without_restrictions();
        assert!(!p.has_restrictions());
        assert!((0..4).all(|l| p.upper_bound_levels(l).is_empty()));
    }
}
