//! Shared test helpers: an enumeration oracle independent of the library's
//! backtracking one, the seeded graph matrix, and the optimization configs.
#![allow(dead_code)]

use gpm_pim::graph::gen_er_graph;
use gpm_pim::memory::AddressMapping;
use gpm_pim::pattern::{Pattern, Semantics};
use gpm_pim::placement::{DuplicationBudget, Placement};
use gpm_pim::pattern::LoopPlan;
use gpm_pim::sim::simulate;
use gpm_pim::{CsrGraph, PimTopology, SimOptions, SimReport};

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn maps_onto(p: &Pattern, g: &CsrGraph, image: &[usize], induced: bool) -> bool {
    let k = p.size();
    for a in 0..k {
        for b in a + 1..k {
            let e = g.has_edge(image[a] as u32, image[b] as u32);
            if p.has_edge(a, b) && !e {
                return false;
            }
            if induced && !p.has_edge(a, b) && e {
                return false;
            }
        }
    }
    true
}

/// Embeddings of `p` in `g`, by trying every bijection from the pattern onto
/// every k-subset of vertices and dividing out the pattern's symmetries.
pub fn subset_oracle(p: &Pattern, g: &CsrGraph, semantics: Semantics) -> u64 {
    let k = p.size();
    let ident: Vec<usize> = (0..k).collect();
    let perms = permutations(&ident);
    let aut = perms
        .iter()
        .filter(|s| (0..k).all(|a| (0..k).all(|b| p.has_edge(a, b) == p.has_edge(s[a], s[b]))))
        .count() as u64;
    let induced = semantics == Semantics::Induced;
    let mut maps = 0u64;
    for subset in combinations(g.num_vertices(), k) {
        for perm in &perms {
            let image: Vec<usize> = perm.iter().map(|&i| subset[i]).collect();
            if maps_onto(p, g, &image, induced) {
                maps += 1;
            }
        }
    }
    assert_eq!(maps % aut, 0, "maps must come in whole symmetry classes");
    maps / aut
}

/// 50 seeded ER graphs: n cycles through 8..=25, p through {0.1, 0.3, 0.5}.
pub fn er_matrix() -> Vec<CsrGraph> {
    (0..50u64)
        .map(|i| {
            let n = 8 + (i as usize * 7) % 18;
            let p = [0.1, 0.3, 0.5][i as usize % 3];
            gen_er_graph(n, p, 0xacce_0000 + i).unwrap()
        })
        .collect()
}

/// all-off, +filter, +remap and duplication, +stealing.
pub fn configs() -> Vec<(&'static str, SimOptions)> {
    let off = SimOptions::default();
    let filter = SimOptions { filter: true, ..off.clone() };
    let remap_dup = SimOptions {
        mapping: AddressMapping::LocalFirst,
        duplication: DuplicationBudget::Auto,
        ..filter.clone()
    };
    let steal = SimOptions { stealing: true, ..remap_dup.clone() };
    vec![("all-off", off), ("filter", filter), ("remap+dup", remap_dup), ("stealing", steal)]
}

pub fn run(g: &CsrGraph, plan: &LoopPlan, topo: &PimTopology, opts: &SimOptions) -> SimReport {
    let placement = Placement::for_options(g, topo, opts).unwrap();
    simulate(g, plan, topo, &placement, opts).unwrap()
}

/// Sorted matched-prefix log of every executed loop iteration.
pub fn iteration_multiset(g: &CsrGraph, plan: &LoopPlan, topo: &PimTopology, opts: &SimOptions) -> Vec<Vec<u32>> {
    let opts = SimOptions { instrument: true, ..opts.clone() };
    let mut it = run(g, plan, topo, &opts).trace.unwrap().iterations;
    it.sort_unstable();
    it
}
