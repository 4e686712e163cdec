mod common;

use common::{configs, iteration_multiset, run, subset_oracle};
use gpm_pim::graph::{gen_er_graph, gen_skewed_graph};
use gpm_pim::pattern::{
    automorphisms, builtin_pattern, compile_plan, oracle_count, reference_count, Semantics, BUILTIN_PATTERNS,
};
use gpm_pim::memory::AddressMapping;
use gpm_pim::placement::DuplicationBudget;
use gpm_pim::{PimTopology, SimOptions};
use proptest::prelude::*;

fn semantics() -> impl Strategy<Value = Semantics> {
    prop_oneof![Just(Semantics::Induced), Just(Semantics::NonInduced)]
}

fn pattern_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(BUILTIN_PATTERNS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn executor_matches_both_oracles(
        name in pattern_name(), sem in semantics(), n in 5usize..16, p in 0.05f64..0.7, seed in any::<u64>()
    ) {
        let g = gen_er_graph(n, p, seed).unwrap();
        let pat = builtin_pattern(name).unwrap();
        let plan = compile_plan(&pat, sem).unwrap();
        let want = subset_oracle(&pat, &g, sem);
        prop_assert_eq!(oracle_count(&pat, &g, sem).unwrap(), want);
        prop_assert_eq!(reference_count(&plan, &g, None).0, want);
    }

    #[test]
    fn restrictions_remove_exactly_the_symmetric_copies(
        name in pattern_name(), sem in semantics(), n in 5usize..30, p in 0.05f64..0.6, seed in any::<u64>()
    ) {
        let g = gen_er_graph(n, p, seed).unwrap();
        let pat = builtin_pattern(name).unwrap();
        let plan = compile_plan(&pat, sem).unwrap();
        let once = reference_count(&plan, &g, None).0;
        let all = reference_count(&plan.without_restrictions(), &g, None).0;
        prop_assert_eq!(all, once * automorphisms(&pat).len() as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_counts_and_accounting(
        name in pattern_name(), sem in semantics(), n in 10usize..50, p in 0.1f64..0.4, seed in any::<u64>(), cfg in 0usize..4
    ) {
        let g = gen_er_graph(n, p, seed).unwrap();
        let plan = compile_plan(&builtin_pattern(name).unwrap(), sem).unwrap();
        let topo = PimTopology::small(2, 4);
        let (_, opts) = &configs()[cfg];
        let r = run(&g, &plan, &topo, opts);
        prop_assert_eq!(r.pattern_count, reference_count(&plan, &g, None).0);
        prop_assert!(r.conserves_bytes(&topo));
        prop_assert!(r.exe_cycles as f64 >= r.avg_cycles);
        prop_assert!(r.tier_accesses.total() == 0 || (r.tier_fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        if !opts.filter || !plan.has_restrictions() {
            prop_assert_eq!(r.filtered_payload_blocks, 0);
        }
    }

    #[test]
    fn stealing_preserves_the_iteration_multiset(
        name in pattern_name(), sem in semantics(), n in 10usize..50, p in 0.1f64..0.5, seed in any::<u64>()
    ) {
        let g = gen_er_graph(n, p, seed).unwrap();
        let plan = compile_plan(&builtin_pattern(name).unwrap(), sem).unwrap();
        let topo = PimTopology::small(2, 2);
        let plain = SimOptions::default();
        let steal = SimOptions { stealing: true, ..plain.clone() };
        prop_assert_eq!(
            iteration_multiset(&g, &plan, &topo, &plain),
            iteration_multiset(&g, &plan, &topo, &steal)
        );
        prop_assert_eq!(run(&g, &plan, &topo, &steal).steal_protocol_violations, 0);
    }

    #[test]
    fn filter_and_duplication_never_add_traffic(
        name in pattern_name(), n in 10usize..60, p in 0.1f64..0.4, seed in any::<u64>()
    ) {
        let g = gen_er_graph(n, p, seed).unwrap();
        let plan = compile_plan(&builtin_pattern(name).unwrap(), Semantics::NonInduced).unwrap();
        let topo = PimTopology::small(2, 2);
        let off = run(&g, &plan, &topo, &SimOptions::default());
        let on = run(&g, &plan, &topo, &SimOptions { filter: true, ..SimOptions::default() });
        prop_assert!(on.transferred_blocks <= off.transferred_blocks);
        let local = SimOptions { mapping: AddressMapping::LocalFirst, ..SimOptions::default() };
        let near = run(&g, &plan, &topo, &local);
        let full = run(&g, &plan, &topo, &SimOptions {
            duplication: DuplicationBudget::Bytes(g.total_list_bytes()),
            ..local
        });
        let remote = |r: &gpm_pim::SimReport| r.tier_accesses.intra + r.tier_accesses.inter;
        prop_assert!(remote(&full) <= remote(&near));
        prop_assert_eq!(remote(&full), 0);
    }
}

#[test]
fn reports_are_identical_across_runs_and_threads() {
    let g = gen_er_graph(60, 0.2, 11).unwrap();
    let plan = compile_plan(&builtin_pattern("4di").unwrap(), Semantics::Induced).unwrap();
    let topo = PimTopology::default();
    for (_, opts) in configs() {
        let first = run(&g, &plan, &topo, &opts).to_json();
        let threaded: Vec<String> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..4).map(|_| s.spawn(|| run(&g, &plan, &topo, &opts).to_json())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(threaded.iter().all(|j| *j == first));
    }
}

#[test]
fn stealing_helps_imbalanced_runs() {
    let topo = PimTopology::default();
    for (n, hub, pat) in [(600, 40, "3cc"), (600, 40, "4cc"), (1000, 60, "3cc"), (1000, 60, "4cc")] {
        let g = gen_skewed_graph(n, hub, 1).unwrap();
        let plan = compile_plan(&builtin_pattern(pat).unwrap(), Semantics::NonInduced).unwrap();
        let plain = run(&g, &plan, &topo, &SimOptions::default());
        let steal = run(&g, &plan, &topo, &SimOptions { stealing: true, ..SimOptions::default() });
        assert!(plain.exe_avg_ratio >= 2.0, "{n}/{hub}/{pat}: workload is not imbalanced");
        assert!(steal.exe_cycles <= plain.exe_cycles, "{n}/{hub}/{pat}");
        assert_eq!(steal.pattern_count, plain.pattern_count);
    }
}

#[test]
fn uniform_work_sampling_is_exact() {
    // without symmetry breaking every root of a ring lattice carries the same work
    let g = gpm_pim::graph::ring_lattice(400, 3);
    let plan = compile_plan(&builtin_pattern("3cc").unwrap(), Semantics::NonInduced).unwrap().without_restrictions();
    let (_, work) = reference_count(&plan, &g, None);
    let roots = gpm_pim::sim::sample_roots(400, 0.25);
    assert_eq!(roots.len(), 100);
    assert_eq!(gpm_pim::sim::work_ratio(&work, &roots, 0.25), 0.25);
}
