//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use fcomp_core::ccc::{build_lookup, check_zigzag, joint_coloring_family, satisfies_ccc, CccVerdict};
use fcomp_core::chargraph::{characteristic_graph, d_characteristic_graph, power_graph};
use fcomp_core::coloring::{
    enumerate_colorings, min_entropy_coloring_exact, min_entropy_coloring_nonzero_case, Coloring, ExactOptions,
};
use fcomp_core::fixtures;
use fcomp_core::graph::Graph;
use fcomp_core::graph_entropy::{
    conditional_graph_entropy, graph_entropy, is_chain_rule_proper, maximal_independent_sets, rate_region_one_stage,
    EntropyOptions,
};
use fcomp_core::model::{FunctionTable, Scenario};
use fcomp_core::netsim::{
    build_plan, build_plan_with, distortion_scheme, feedback_plan, simulate, simulate_distortion, simulate_feedback,
    PlanOptions, SimMode, Strategy,
};
use fcomp_core::prob::ProbTable;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> std::result::Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || {
        format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64())
    })
}

fn fcomp(args: &[&str]) -> std::result::Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_fcomp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} exited with {:?}", o.status.code()));
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn field(text: &str, key: &str) -> Option<f64> {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|rest| rest.trim().split_whitespace().next())
        .and_then(|v| v.parse().ok())
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

/// Two sources with random alphabets and a random support.
fn random_scenario(rng: &mut ChaCha8Rng, max: usize, density: f64, values: u32) -> Scenario {
    loop {
        let a = rng.gen_range(1..=max);
        let b = rng.gen_range(1..=max);
        let w: Vec<f64> = (0..a * b)
            .map(|_| if rng.gen_bool(density) { rng.gen_range(1..=4) as f64 } else { 0.0 })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            continue;
        }
        let f: Vec<u32> = (0..a * b).map(|_| rng.gen_range(0..values)).collect();
        return Scenario::new(
            vec![a, b],
            normalized(&w),
            vec![FunctionTable {
                name: "f".into(),
                table: f,
            }],
        )
        .expect("valid scenario");
    }
}

fn with_identity(s: &Scenario) -> Scenario {
    let cells = s.pmf().len();
    Scenario::new(
        s.alphabets().to_vec(),
        s.pmf().to_vec(),
        vec![FunctionTable {
            name: "identity".into(),
            table: (0..cells as u32).collect(),
        }],
    )
    .expect("identity table")
}

fn c1_c4_graph_entropy() -> Check {
    let t = Instant::now();
    let out = fcomp(&["entropy", "mod2.json", "--source", "1"])?;
    let elapsed = t.elapsed();
    let bits = field(&out, "graph entropy:").ok_or("no graph entropy line")?;
    ensure((bits - 1.0).abs() < 1e-6, || format!("got {bits}"))?;
    within(elapsed, 1.0)?;
    Ok(format!("H = {bits:.6} bits in {:.3}s", elapsed.as_secs_f64()))
}

fn c2_pentagon() -> Check {
    let t = Instant::now();
    let pentagon = fixtures::bundled("pentagon").map_err(|e| e.to_string())?;
    let g = characteristic_graph(&pentagon, 0).map_err(|e| e.to_string())?;
    ensure(g.edges() == Graph::cycle(5).edges(), || "fixture graph is not C5".into())?;
    let opts = ExactOptions::default();
    let one = min_entropy_coloring_exact(&g, &opts).map_err(|e| e.to_string())?;
    ensure((one.entropy - 1.521928).abs() < 1e-6, || format!("C5: {}", one.entropy))?;
    let g2 = power_graph(&g, 2, 1_000_000).map_err(|e| e.to_string())?;
    let two = min_entropy_coloring_exact(&g2, &opts).map_err(|e| e.to_string())?;
    let per_symbol = two.entropy / 2.0;
    ensure(per_symbol <= 1.49, || format!("C5^2 per symbol {per_symbol}"))?;
    let elapsed = t.elapsed();
    within(elapsed, 60.0)?;
    Ok(format!(
        "C5 {:.6} bits, C5^2 {:.6} bits/symbol ({} colors, {} nodes) in {:.1}s",
        one.entropy,
        per_symbol,
        two.coloring.count(),
        two.nodes_explored,
        elapsed.as_secs_f64()
    ))
}

fn c3_parity_tree() -> Check {
    let t = Instant::now();
    let out = fcomp(&["simulate", "parity4.json", "--n", "1", "--mode", "exhaustive"])?;
    let elapsed = t.elapsed();
    ensure(out.contains("errors: 0/16"), || "expected errors: 0/16".into())?;
    let rates: Vec<f64> = out
        .lines()
        .filter(|l| l.starts_with("link "))
        .filter_map(|l| l.split("rate ").nth(1)?.split_whitespace().next()?.parse().ok())
        .collect();
    ensure(rates.len() == 6, || format!("{} links reported", rates.len()))?;
    ensure(rates.iter().all(|r| (r - 1.0).abs() < 1e-9), || format!("rates {rates:?}"))?;
    within(elapsed, 1.0)?;
    Ok(format!("0/16 errors, 6 links at 1.000000 bit/symbol in {:.3}s", elapsed.as_secs_f64()))
}

fn c4_three_way() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut held, mut failed) = (0, 0);
    let scenarios = 400;
    for round in 0..scenarios {
        let s = random_scenario(&mut rng, 4, 0.55, 3);
        let m = s.model(0).map_err(|e| e.to_string())?;
        let options: Vec<Vec<Coloring>> = (0..2)
            .map(|i| enumerate_colorings(&characteristic_graph(&s, i).unwrap(), 1_000_000).unwrap())
            .collect();
        let c: Vec<Coloring> = options.iter().map(|o| o[rng.gen_range(0..o.len())].clone()).collect();
        let family = joint_coloring_family(&m, &c).map_err(|e| e.to_string())?;
        let holds = satisfies_ccc(&family).map_err(|e| e.to_string())?.holds();
        let lookup = build_lookup(&family).is_ok();
        let opts = PlanOptions {
            enforce_ccc: false,
            ..PlanOptions::default()
        };
        let plan = build_plan_with(&s, &opts, Some(&c)).map_err(|e| e.to_string())?;
        let errors = simulate(&s, &plan, SimMode::Exhaustive).map_err(|e| e.to_string())?.errors;
        ensure(holds == lookup && holds == (errors == 0), || {
            format!("scenario {round}: condition {holds}, lookup {lookup}, errors {errors}")
        })?;
        if holds {
            held += 1;
        } else {
            failed += 1;
        }
    }
    ensure(held > 0 && failed > 0, || format!("only one side exercised ({held}/{failed})"))?;
    let ex2 = fixtures::bundled("example2").map_err(|e| e.to_string())?;
    let fam = joint_coloring_family(&ex2.model(0).unwrap(), &[Coloring::single(2), Coloring::single(2)])
        .map_err(|e| e.to_string())?;
    match satisfies_ccc(&fam).map_err(|e| e.to_string())? {
        CccVerdict::Violated(w) if w.a == vec![0, 0] && w.b == vec![1, 1] => {}
        v => return Err(format!("Example 2 verdict {v:?}")),
    }
    let elapsed = t.elapsed();
    within(elapsed, 120.0)?;
    Ok(format!(
        "{scenarios} scenarios ({held} satisfied, {failed} violated), Example 2 witness (0,0)/(1,1), {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn is_clique_union(g: &Graph) -> bool {
    // complement is a disjoint union of cliques iff non-adjacency is transitive
    let n = g.n();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| {
                a == b || b == c || a == c || g.has_edge(a, b) || g.has_edge(b, c) || !g.has_edge(a, c)
            })
        })
    })
}

fn c5_polynomial_case() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let opts = ExactOptions::default();
    let scenarios = 150;
    for round in 0..scenarios {
        let s = random_scenario(&mut rng, 6, 1.0, 4);
        for i in 0..2 {
            let g = characteristic_graph(&s, i).map_err(|e| e.to_string())?;
            ensure(is_clique_union(&g), || format!("scenario {round} X{}: complement not a clique union", i + 1))?;
            let fast = min_entropy_coloring_nonzero_case(&g).map_err(|e| e.to_string())?;
            let exact = min_entropy_coloring_exact(&g, &opts).map_err(|e| e.to_string())?;
            ensure((fast.entropy - exact.entropy).abs() < 1e-9, || {
                format!("scenario {round} X{}: {} vs {}", i + 1, fast.entropy, exact.entropy)
            })?;
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, 60.0)?;
    Ok(format!("{scenarios} positive scenarios, 300 graphs agree, {:.1}s", elapsed.as_secs_f64()))
}

/// `min over a in VP(G) of -sum p_x log a_x`, with `a` ranging over convex
/// combinations of maximal independent sets on a grid of step 1/steps.
fn packing_grid_entropy(g: &Graph, steps: usize) -> f64 {
    let sets = maximal_independent_sets(g, 1_000_000).unwrap();
    let total = g.total_prob();
    let p: Vec<f64> = g.prob().iter().map(|x| x / total).collect();
    let mut best = f64::INFINITY;
    let mut a = vec![0.0; g.n()];
    fn rec(i: usize, left: usize, steps: usize, sets: &[Vec<usize>], p: &[f64], a: &mut Vec<f64>, best: &mut f64) {
        if i + 1 == sets.len() {
            let w = left as f64 / steps as f64;
            sets[i].iter().for_each(|&x| a[x] += w);
            let v: f64 = p
                .iter()
                .zip(a.iter())
                .filter(|(&px, _)| px > 0.0)
                .map(|(&px, &ax)| if ax > 0.0 { -px * ax.log2() } else { f64::INFINITY })
                .sum();
            *best = best.min(v);
            sets[i].iter().for_each(|&x| a[x] -= w);
            return;
        }
        for k in 0..=left {
            let w = k as f64 / steps as f64;
            sets[i].iter().for_each(|&x| a[x] += w);
            rec(i + 1, left - k, steps, sets, p, a, best);
            sets[i].iter().for_each(|&x| a[x] -= w);
        }
    }
    rec(0, steps, steps, &sets, &p, &mut a, &mut best);
    best
}

fn suite_graphs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for (name, s) in fixtures::all() {
        for i in 0..s.sources() {
            let g = characteristic_graph(&s, i).unwrap();
            if g.n() <= 5 && g.total_prob() > 0.0 {
                out.push((format!("{name}/X{}", i + 1), g));
            }
        }
    }
    let dist = fixtures::bundled("distortion").unwrap();
    for level in [0.0, 0.5, 1.0] {
        out.push((format!("distortion/D{level}"), d_characteristic_graph(&dist, 0, level).unwrap()));
    }
    out.push(("P4 skewed".into(), Graph::simple(vec![0.4, 0.3, 0.2, 0.1], [(0, 1), (1, 2), (2, 3)])));
    out.push(("star".into(), Graph::simple(vec![0.1, 0.3, 0.3, 0.3], [(0, 1), (0, 2), (0, 3)])));
    out.push(("bull".into(), Graph::simple(vec![0.3, 0.1, 0.2, 0.25, 0.15], [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4)])));
    out
}

fn c6_korner_oracle() -> Check {
    let t = Instant::now();
    let graphs = suite_graphs();
    let mut worst: f64 = 0.0;
    for (name, g) in &graphs {
        let h = graph_entropy(g, &EntropyOptions::default()).map_err(|e| e.to_string())?;
        ensure(h.trajectory.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
            format!("{name}: objective increased")
        })?;
        let grid = packing_grid_entropy(g, 100);
        worst = worst.max((h.bits - grid).abs());
        ensure((h.bits - grid).abs() < 1e-3, || format!("{name}: {} vs grid {grid}", h.bits))?;
    }
    Ok(format!(
        "{} graphs, max |alt-min - grid| = {worst:.2e}, monotone, {:.1}s",
        graphs.len(),
        t.elapsed().as_secs_f64()
    ))
}

fn c7_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut cases: Vec<Scenario> = fixtures::all()
        .into_iter()
        .filter(|(_, s)| s.sources() == 2)
        .map(|(_, s)| s)
        .collect();
    cases.extend((0..40).map(|_| random_scenario(&mut rng, 3, 0.6, 1)));
    for s in &cases {
        let id = with_identity(s);
        let region = rate_region_one_stage(&id, 1, 1_000_000).map_err(|e| e.to_string())?;
        let t = ProbTable::new(s.alphabets().to_vec(), s.pmf().to_vec()).map_err(|e| e.to_string())?;
        let want = [
            (vec![0], t.conditional_entropy_of(&[0], &[1])),
            (vec![1], t.conditional_entropy_of(&[1], &[0])),
            (vec![0, 1], t.entropy()),
        ];
        for (subset, h) in want {
            let got = region.bound_for(&subset).ok_or("missing inequality")?;
            ensure((got - h).abs() < 1e-9, || format!("subset {subset:?}: {got} vs {h}"))?;
        }
        checked += 1;
    }
    // full support makes the identity graph complete
    let s = with_identity(&random_scenario(&mut ChaCha8Rng::seed_from_u64(70), 4, 1.0, 1));
    let g = characteristic_graph(&s, 0).map_err(|e| e.to_string())?;
    ensure(g.edge_count() == g.n() * (g.n() - 1) / 2, || "graph not complete".into())?;
    let t = ProbTable::new(s.alphabets().to_vec(), s.pmf().to_vec()).map_err(|e| e.to_string())?;
    let h = conditional_graph_entropy(&g, &t, &EntropyOptions::default()).map_err(|e| e.to_string())?;
    let want = t.conditional_entropy_of(&[0], &[1]);
    ensure((h.bits - want).abs() < 1e-6, || format!("H_G(X1|X2) {} vs H(X1|X2) {want}", h.bits))?;
    Ok(format!(
        "{checked} regions match Shannon bounds; complete graph H_G(X1|X2) = {:.6} = H(X1|X2)",
        h.bits
    ))
}

fn c8_zigzag() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut zig, mut pairs) = (0, 0);
    for round in 0..300 {
        let s = random_scenario(&mut rng, 3, 0.7, 3);
        let m = s.model(0).unwrap();
        if !check_zigzag(&m).map_err(|e| e.to_string())? {
            continue;
        }
        zig += 1;
        let o1 = enumerate_colorings(&characteristic_graph(&s, 0).unwrap(), 1_000_000).unwrap();
        let o2 = enumerate_colorings(&characteristic_graph(&s, 1).unwrap(), 1_000_000).unwrap();
        for a in &o1 {
            for b in &o2 {
                let fam = joint_coloring_family(&m, &[a.clone(), b.clone()]).map_err(|e| e.to_string())?;
                ensure(satisfies_ccc(&fam).map_err(|e| e.to_string())?.holds(), || {
                    format!("scenario {round}: zigzag holds but condition fails")
                })?;
                pairs += 1;
            }
        }
    }
    ensure(zig > 20, || format!("only {zig} zigzag scenarios"))?;
    // one side colored trivially: the condition holds although zigzag fails
    let s = fixtures::bundled("ccc-fail").unwrap();
    let m = s.model(0).unwrap();
    let c1 = min_entropy_coloring_exact(&characteristic_graph(&s, 0).unwrap(), &ExactOptions::default())
        .unwrap()
        .coloring;
    let fam = joint_coloring_family(&m, &[c1, Coloring::trivial(2)]).map_err(|e| e.to_string())?;
    ensure(!check_zigzag(&m).unwrap(), || "fixture satisfies zigzag".into())?;
    ensure(satisfies_ccc(&fam).map_err(|e| e.to_string())?.holds(), || "condition fails".into())?;
    Ok(format!(
        "{zig} zigzag scenarios, {pairs} coloring pairs all satisfy the condition; ccc-fail with trivial X2 satisfies it without zigzag"
    ))
}

fn c9_feedback() -> Check {
    let s = fixtures::bundled("feedback").unwrap();
    let plan = feedback_plan(&s, 1, 1_000_000).map_err(|e| e.to_string())?;
    ensure(plan.p_a < 1.0, || "P_a = 1".into())?;
    // hand-derived: H(c_min) = 2, H(c') = 2.5, P_a = 1/4
    ensure((plan.h_min - 2.0).abs() < 1e-12 && (plan.h_prime - 2.5).abs() < 1e-12, || {
        format!("H(c_min) {}, H(c') {}", plan.h_min, plan.h_prime)
    })?;
    ensure((plan.p_a - 0.25).abs() < 1e-12, || format!("P_a {}", plan.p_a))?;
    let formula = (1.0 - plan.p_a) * (plan.h_prime - plan.h_min) / plan.n as f64;
    ensure(plan.gain == formula && (plan.gain - 0.375).abs() < 1e-12, || format!("gain {}", plan.gain))?;
    let mut sims = Vec::new();
    for mode in [SimMode::Exhaustive, SimMode::Sampled { trials: 20_000, seed: 9 }] {
        let r = simulate_feedback(&s, &plan, mode).map_err(|e| e.to_string())?;
        ensure(r.errors == 0, || format!("{mode}: {} errors", r.errors))?;
        let fb = r.feedback.unwrap();
        ensure((fb.empirical_gain - plan.gain).abs() < 0.05, || {
            format!("{mode}: simulated gain {}", fb.empirical_gain)
        })?;
        sims.push(fb.empirical_gain);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut identity = vec![fixtures::bundled("example2").unwrap()];
    identity.extend((0..20).map(|_| with_identity(&random_scenario(&mut rng, 3, 1.0, 1))));
    for (i, s) in identity.iter().enumerate() {
        let p = feedback_plan(s, 1, 1_000_000).map_err(|e| e.to_string())?;
        ensure(p.gain.abs() < 1e-12, || format!("identity scenario {i}: gain {}", p.gain))?;
        let r = simulate_feedback(s, &p, SimMode::Exhaustive).map_err(|e| e.to_string())?;
        ensure(r.errors == 0, || format!("identity scenario {i}: errors"))?;
    }
    Ok(format!(
        "gain {:.6} = (1-{:.2})({:.1}-{:.1}); simulated {:.6} / {:.6}; {} identity scenarios with gain 0",
        plan.gain,
        plan.p_a,
        plan.h_prime,
        plan.h_min,
        sims[0],
        sims[1],
        identity.len()
    ))
}

fn c10_distortion() -> Check {
    let s = fixtures::bundled("distortion").unwrap();
    let mut edges = Vec::new();
    let mut worst = Vec::new();
    for d in [0.0, 1.0, 2.0] {
        let scheme = distortion_scheme(&s, d, Strategy::Exact).map_err(|e| e.to_string())?;
        let r = simulate_distortion(&s, &scheme, SimMode::Exhaustive).map_err(|e| e.to_string())?;
        let max = r.max_distortion.unwrap();
        ensure(max <= d + 1e-12, || format!("D={d}: distortion {max}"))?;
        worst.push(max);
        edges.push(scheme.graphs.iter().map(|g| g.edges()).collect::<Vec<_>>());
        if d == 0.0 {
            let plan = build_plan(&s, &PlanOptions::default()).map_err(|e| e.to_string())?;
            let lossless: Vec<Coloring> = plan
                .tree
                .stage_nodes(1)
                .iter()
                .map(|v| plan.nodes[v].coloring.clone())
                .collect();
            ensure(lossless == scheme.colorings, || "D=0 colorings differ from the lossless plan".into())?;
            ensure(r.errors == 0 && max == 0.0, || "D=0 is lossy".into())?;
        }
    }
    for w in edges.windows(2) {
        for i in 0..2 {
            ensure(w[1][i].iter().all(|e| w[0][i].contains(e)), || "edges grew with D".into())?;
        }
    }
    ensure(edges[2][0] == vec![(0, 2)] && edges[2][1] == vec![(0, 2)], || "D=2 graphs".into())?;
    let counts: Vec<usize> = edges.iter().map(|e| e[0].len()).collect();
    Ok(format!("max distortion {worst:?} for D = [0, 1, 2]; X1 edge counts {counts:?}"))
}

fn c11_chain_rule() -> Check {
    let s = fixtures::bundled("mod2").unwrap();
    let report = is_chain_rule_proper(&s, 1, 1e-9, 1_000_000).map_err(|e| e.to_string())?;
    let gap = report.gaps.iter().find(|g| g.subset == vec![0, 1]).ok_or("no gap for {X1,X2}")?;
    ensure((gap.joint - gap.super_source).abs() > 0.01, || {
        format!("chained {} vs joint {}", gap.joint, gap.super_source)
    })?;
    ensure(!report.proper, || "reported proper".into())?;
    Ok(format!(
        "mod2: chained sum {:.6} vs joint {:.6} bits (gap {:.6})",
        gap.joint,
        gap.super_source,
        gap.joint - gap.super_source
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("C4 graph entropy", c1_c4_graph_entropy),
        ("pentagon colorings", c2_pentagon),
        ("parity tree end-to-end", c3_parity_tree),
        ("connectivity condition three-way equivalence", c4_three_way),
        ("polynomial-case optimality", c5_polynomial_case),
        ("graph entropy grid oracle", c6_korner_oracle),
        ("identity-function specializations", c7_identity),
        ("zigzag vs connectivity condition", c8_zigzag),
        ("feedback gain", c9_feedback),
        ("distortion guarantee", c10_distortion),
        ("chain-rule failure exhibit", c11_chain_rule),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
