use super::{automorphisms, Pattern, Semantics};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

pub const ORACLE_MAX_VERTICES: usize = 64;

/// Number of injective maps pattern -> graph that preserve edges (and, for
/// induced semantics, non-edges). Plain backtracking over vertex ids; no
/// set operations, orders, or restrictions involved.
pub fn oracle_raw_maps(p: &Pattern, g: &CsrGraph, semantics: Semantics) -> Result<u64> {
    let n = g.num_vertices();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleTooLarge(n));
    }
    // 64-bit adjacency rows
    let adj: Vec<u64> = (0..n as VertexId)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let mut image = Vec::with_capacity(p.size());
    Ok(extend(p, &adj, semantics, &mut image, 0))
}

fn extend(p: &Pattern, adj: &[u64], semantics: Semantics, image: &mut Vec<usize>, used: u64) -> u64 {
    let i = image.len();
    if i == p.size() {
        return 1;
    }
    let mut total = 0;
    for x in 0..adj.len() {
        if used & (1 << x) != 0 {
            continue;
        }
        let fits = image.iter().enumerate().all(|(j, &y)| {
            let want = p.has_edge(i, j);
            let have = adj[x] & (1 << y) != 0;
            match semantics {
                Semantics::NonInduced => !want || have,
                Semantics::Induced => want == have,
            }
        });
        if fits {
            image.push(x);
            total += extend(p, adj, semantics, image, used | (1 << x));
            image.pop();
        }
    }
    total
}

/// Embedding count: injective maps divided by the automorphism count.
pub fn oracle_count(p: &Pattern, g: &CsrGraph, semantics: Semantics) -> Result<u64> {
    let raw = oracle_raw_maps(p, g, semantics)?;
    let aut = automorphisms(p).len() as u64;
    debug_assert_eq!(raw % aut, 0, "map count must be a multiple of |Aut|");
    Ok(raw / aut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, gen_er_graph, path_graph};
    use crate::pattern::{builtin_pattern, BUILTIN_PATTERNS};

    fn count(name: &str, g: &CsrGraph, s: Semantics) -> u64 {
        oracle_count(&builtin_pattern(name).unwrap(), g, s).unwrap()
    }

    #[test]
    fn closed_forms() {
        let k4 = complete_graph(4);
        assert_eq!(count("4cl", &k4, Semantics::NonInduced), 3);
        assert_eq!(count("4cl", &k4, Semantics::Induced), 0);
        assert_eq!(count("4di", &k4, Semantics::NonInduced), 6);
        assert_eq!(count("3cc", &k4, Semantics::NonInduced), 4);
        assert_eq!(count("wedge", &path_graph(3), Semantics::Induced), 1);
        assert_eq!(count("5cc", &complete_graph(6), Semantics::Induced), 6);
    }

    #[test]
    fn raw_counts_divisible_by_automorphisms() {
        for seed in 0..10 {
            let g = gen_er_graph(12, 0.4, seed).unwrap();
            for name in BUILTIN_PATTERNS {
                let p = builtin_pattern(name).unwrap();
                let aut = automorphisms(&p).len() as u64;
                for s in [Semantics::Induced, Semantics::NonInduced] {
                    assert_eq!(oracle_raw_maps(&p, &g, s).unwrap() % aut, 0, "{name} {s}");
                }
            }
        }
    }

    #[test]
    fn size_guard() {
        let g = path_graph(65);
        let p = builtin_pattern("wedge").unwrap();
        assert!(matches!(
            oracle_count(&p, &g, Semantics::Induced),
            Err(Error::OracleTooLarge(65))
        ));
    }
}
