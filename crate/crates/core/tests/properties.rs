use fcomp_core::ccc::{build_lookup, check_zigzag, joint_coloring_family, satisfies_ccc};
use fcomp_core::chargraph::{characteristic_graph, d_characteristic_graph, epsilon_restrict, power_graph};
use fcomp_core::coloring::{
    enumerate_colorings, greedy_mis_coloring, is_valid_coloring, min_entropy_coloring_exact,
    min_entropy_coloring_nonzero_case, refine, Coloring, ExactOptions,
};
use fcomp_core::graph::Graph;
use fcomp_core::graph_entropy::{graph_entropy, rate_region_one_stage, EntropyOptions};
use fcomp_core::model::{FunctionTable, Scenario, TreeNodeSpec, TreeSpec};
use fcomp_core::netsim::{
    average_length, build_plan_with, complete_tree, distortion_scheme, feedback_plan, simulate, simulate_distortion,
    simulate_feedback, PlanOptions, SimMode, Strategy as PlanStrategy,
};
use fcomp_core::prob::{entropy_of, ProbTable};
use proptest::prelude::*;

fn normalize(w: &[u32]) -> Vec<f64> {
    let t: u32 = w.iter().sum();
    w.iter().map(|&x| x as f64 / t as f64).collect()
}

/// Two sources with alphabets up to `max`, random support, values in `0..vals`.
fn scenario2(max: usize, vals: u32, min_weight: u32) -> impl Strategy<Value = Scenario> {
    (1..=max, 1..=max).prop_flat_map(move |(a, b)| {
        let cells = a * b;
        (
            prop::collection::vec(min_weight..4u32, cells),
            prop::collection::vec(0..vals, cells),
        )
            .prop_filter("some mass", |(w, _)| w.iter().any(|&x| x > 0))
            .prop_map(move |(w, f)| {
                Scenario::new(
                    vec![a, b],
                    normalize(&w),
                    vec![FunctionTable {
                        name: "f".into(),
                        table: f,
                    }],
                )
                .unwrap()
            })
    })
}

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0..5u32, n),
            prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
        )
            .prop_filter("some mass", |(w, _)| w.iter().any(|&x| x > 0))
            .prop_map(move |(w, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                Graph::simple(normalize(&w), edges)
            })
    })
}

/// Minimum coloring entropy by listing every partition of the vertices.
fn brute_force_min_entropy(g: &Graph) -> f64 {
    let n = g.n();
    let mut best = f64::INFINITY;
    let mut rgs = vec![0usize; n];
    fn rec(g: &Graph, i: usize, rgs: &mut Vec<usize>, max: usize, best: &mut f64) {
        if i == g.n() {
            let c = Coloring::new(rgs.clone());
            if is_valid_coloring(g, &c) {
                *best = best.min(c.entropy(g.prob()));
            }
            return;
        }
        for col in 0..=max + 1 {
            rgs[i] = col;
            rec(g, i + 1, rgs, max.max(col), best);
        }
    }
    if n == 0 {
        return 0.0;
    }
    rgs[0] = 0;
    rec(g, 1, &mut rgs, 0, &mut best);
    best
}

fn pick(options: &[Coloring], seed: usize) -> Coloring {
    options[seed % options.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn scenario_round_trip_is_bit_exact(s in scenario2(4, 3, 0)) {
        let back = Scenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_json(), s.to_json());
    }

    #[test]
    fn characteristic_edges_match_definition(s in scenario2(4, 3, 0)) {
        let a = s.alphabets().to_vec();
        let p = |x: usize, y: usize| s.pmf()[x * a[1] + y];
        let f = |x: usize, y: usize| s.functions()[0].table[x * a[1] + y];
        let g1 = characteristic_graph(&s, 0).unwrap();
        for u in 0..a[0] {
            for v in u + 1..a[0] {
                let edge = (0..a[1]).any(|y| p(u, y) > 0.0 && p(v, y) > 0.0 && f(u, y) != f(v, y));
                prop_assert_eq!(g1.has_edge(u, v), edge);
            }
        }
        let g2 = characteristic_graph(&s, 1).unwrap();
        for u in 0..a[1] {
            for v in u + 1..a[1] {
                let edge = (0..a[0]).any(|x| p(x, u) > 0.0 && p(x, v) > 0.0 && f(x, u) != f(x, v));
                prop_assert_eq!(g2.has_edge(u, v), edge);
            }
        }
    }

    #[test]
    fn exact_search_matches_partition_oracle(g in small_graph(7)) {
        let r = min_entropy_coloring_exact(&g, &ExactOptions::default()).unwrap();
        prop_assert!(is_valid_coloring(&g, &r.coloring));
        prop_assert!((r.entropy - brute_force_min_entropy(&g)).abs() < 1e-9);
    }

    #[test]
    fn heuristics_are_valid_and_never_beat_exact(g in small_graph(9)) {
        let exact = min_entropy_coloring_exact(&g, &ExactOptions::default()).unwrap();
        let greedy = greedy_mis_coloring(&g);
        prop_assert!(is_valid_coloring(&g, &greedy.coloring));
        let refined = refine(&g, &greedy.coloring);
        prop_assert!(is_valid_coloring(&g, &refined));
        prop_assert!(refined.entropy(g.prob()) <= greedy.entropy + 1e-12);
        prop_assert!(exact.entropy <= refined.entropy(g.prob()) + 1e-12);
    }

    #[test]
    fn block_coloring_is_subadditive(g in small_graph(4)) {
        let opts = ExactOptions::default();
        let one = min_entropy_coloring_exact(&g, &opts).unwrap().entropy;
        let two = min_entropy_coloring_exact(&power_graph(&g, 2, 1_000_000).unwrap(), &opts).unwrap().entropy;
        prop_assert!(two <= 2.0 * one + 1e-9);
    }

    #[test]
    fn nonzero_case_is_optimal(s in scenario2(4, 3, 1)) {
        for i in 0..2 {
            let g = characteristic_graph(&s, i).unwrap();
            let fast = min_entropy_coloring_nonzero_case(&g).unwrap();
            let exact = min_entropy_coloring_exact(&g, &ExactOptions::default()).unwrap();
            prop_assert!((fast.entropy - exact.entropy).abs() < 1e-9);
        }
    }

    #[test]
    fn zigzag_implies_ccc(s in scenario2(4, 3, 0), i in 0usize..1000, j in 0usize..1000) {
        let m = s.model(0).unwrap();
        prop_assume!(check_zigzag(&m).unwrap());
        let o1 = enumerate_colorings(&characteristic_graph(&s, 0).unwrap(), 100_000).unwrap();
        let o2 = enumerate_colorings(&characteristic_graph(&s, 1).unwrap(), 100_000).unwrap();
        let fam = joint_coloring_family(&m, &[pick(&o1, i), pick(&o2, j)]).unwrap();
        prop_assert!(satisfies_ccc(&fam).unwrap().holds());
    }

    #[test]
    fn ccc_lookup_and_simulation_agree(s in scenario2(4, 3, 0), i in 0usize..1000, j in 0usize..1000) {
        let m = s.model(0).unwrap();
        let o1 = enumerate_colorings(&characteristic_graph(&s, 0).unwrap(), 100_000).unwrap();
        let o2 = enumerate_colorings(&characteristic_graph(&s, 1).unwrap(), 100_000).unwrap();
        let c = [pick(&o1, i), pick(&o2, j)];
        let holds = satisfies_ccc(&joint_coloring_family(&m, &c).unwrap()).unwrap().holds();
        let lookup = build_lookup(&joint_coloring_family(&m, &c).unwrap()).is_ok();
        let opts = PlanOptions { enforce_ccc: false, ..PlanOptions::default() };
        let plan = build_plan_with(&s, &opts, Some(&c)).unwrap();
        let errors = simulate(&s, &plan, SimMode::Exhaustive).unwrap().errors;
        prop_assert_eq!(holds, lookup);
        prop_assert_eq!(holds, errors == 0);
    }

    #[test]
    fn repaired_plans_always_decode(s in scenario2(3, 3, 0)) {
        let plan = build_plan_with(&s, &PlanOptions::default(), None).unwrap();
        prop_assert!(plan.decodable);
        prop_assert_eq!(simulate(&s, &plan, SimMode::Exhaustive).unwrap().errors, 0);
    }

    #[test]
    fn korner_entropy_is_monotone_and_bracketed(g in small_graph(6)) {
        let h = graph_entropy(&g, &EntropyOptions::default()).unwrap();
        prop_assert!(h.trajectory.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let shannon = entropy_of(g.prob());
        let chromatic = min_entropy_coloring_exact(&g, &ExactOptions::default()).unwrap().entropy;
        prop_assert!(h.bits >= -1e-12);
        prop_assert!(h.bits <= chromatic + 1e-6);
        prop_assert!(h.bits <= shannon + 1e-6);
    }

    #[test]
    fn restriction_drops_at_most_eps(g in small_graph(7), eps in 0.0f64..0.5) {
        let r = epsilon_restrict(&g, eps).unwrap();
        prop_assert!(r.removed_mass <= eps + 1e-12);
        prop_assert_eq!(r.kept.len() + r.removed.len(), g.n());
    }

    #[test]
    fn export_round_trip(g in small_graph(7)) {
        let back = Graph::parse_export(&g.export()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        for v in 0..g.n() {
            prop_assert!((back.prob()[v] - g.prob()[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn huffman_is_within_one_bit(w in prop::collection::vec(0u32..20, 1..12)) {
        prop_assume!(w.iter().any(|&x| x > 0));
        let p = normalize(&w);
        let h = entropy_of(&p);
        let l = average_length(&p);
        prop_assert!(l >= h - 1e-9);
        prop_assert!(l < h + 1.0 + 1e-9 || p.iter().filter(|&&x| x > 0.0).count() == 1);
    }

    #[test]
    fn identity_region_is_slepian_wolf(s in scenario2(3, 1, 0)) {
        let a = s.alphabets().to_vec();
        let id = s.clone().with_functions(vec![FunctionTable {
            name: "id".into(),
            table: (0..a[0] * a[1]).map(|c| c as u32).collect(),
        }]).unwrap();
        let region = rate_region_one_stage(&id, 1, 1_000_000).unwrap();
        let t = ProbTable::new(a.clone(), s.pmf().to_vec()).unwrap();
        prop_assert!((region.bound_for(&[0]).unwrap() - t.conditional_entropy_of(&[0], &[1])).abs() < 1e-9);
        prop_assert!((region.bound_for(&[1]).unwrap() - t.conditional_entropy_of(&[1], &[0])).abs() < 1e-9);
        prop_assert!((region.bound_for(&[0, 1]).unwrap() - t.entropy()).abs() < 1e-9);
    }

    #[test]
    fn block_bounds_do_not_grow_with_n(s in scenario2(2, 3, 0)) {
        let one = rate_region_one_stage(&s, 1, 1_000_000).unwrap();
        let two = rate_region_one_stage(&s, 2, 1_000_000).unwrap();
        for (a, b) in one.inequalities.iter().zip(&two.inequalities) {
            prop_assert!(b.bound <= a.bound + 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn feedback_gain_is_nonnegative(s in scenario2(3, 3, 0)) {
        let plan = feedback_plan(&s, 1, 1_000_000).unwrap();
        prop_assert!(plan.gain >= -1e-12);
        if plan.violating.is_empty() {
            prop_assert!(plan.gain.abs() < 1e-12);
        }
        let r = simulate_feedback(&s, &plan, SimMode::Exhaustive).unwrap();
        prop_assert_eq!(r.errors, 0);
    }

    #[test]
    fn distortion_scheme_meets_its_guarantee(
        wa in prop::collection::vec(1u32..4, 1..=4),
        wb in prop::collection::vec(1u32..4, 1..=4),
        d in 0u32..6,
    ) {
        let (pa, pb) = (normalize(&wa), normalize(&wb));
        let pmf: Vec<f64> = pa.iter().flat_map(|x| pb.iter().map(move |y| x * y)).collect();
        let s = Scenario::from_fn(vec![pa.len(), pb.len()], pmf, |c| (c[0] + c[1]) as u32)
            .unwrap()
            .with_distortion((0..7).map(|a: i32| (0..7).map(|b: i32| (a - b).abs() as f64).collect()).collect())
            .unwrap();
        let scheme = distortion_scheme(&s, d as f64, PlanStrategy::Exact).unwrap();
        let r = simulate_distortion(&s, &scheme, SimMode::Exhaustive).unwrap();
        prop_assert!(r.max_distortion.unwrap() <= d as f64 + 1e-12);
        let coarser = d_characteristic_graph(&s, 0, (d + 1) as f64).unwrap();
        let finer = d_characteristic_graph(&s, 0, d as f64).unwrap();
        prop_assert!(coarser.edges().iter().all(|&(u, v)| finer.has_edge(u, v)));
    }

    #[test]
    fn completed_trees_are_staged(parents in prop::collection::vec(0usize..100, 1..6), holders in prop::collection::vec(0usize..100, 1..5)) {
        // node i + 1 hangs below some earlier node; sources sit on non-receiver nodes
        let mut nodes = vec![TreeNodeSpec { name: "r".into(), parent: None, sources: vec![] }];
        for (i, &p) in parents.iter().enumerate() {
            nodes.push(TreeNodeSpec { name: format!("n{}", i + 1), parent: Some(nodes[p % (i + 1)].name.clone()), sources: vec![] });
        }
        for (s, &h) in holders.iter().enumerate() {
            nodes[1 + h % parents.len()].sources.push(s);
        }
        let k = holders.len();
        let scenario = Scenario::from_fn(vec![2; k], vec![1.0 / (1u32 << k) as f64; 1 << k], |c| c.iter().sum::<usize>() as u32 % 2)
            .unwrap()
            .with_tree(TreeSpec { nodes })
            .unwrap();
        let t = complete_tree(&scenario).unwrap();
        for leaf in t.nodes.iter().filter(|n| n.source.is_some()) {
            prop_assert_eq!(leaf.depth, t.depth);
        }
        for stage in 1..=t.depth {
            let mut all: Vec<usize> = t.connection_set(stage).concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..k).collect::<Vec<_>>());
        }
    }
}
