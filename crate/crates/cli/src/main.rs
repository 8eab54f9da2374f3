use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fcomp_core::ccc::{build_lookup, check_zigzag, joint_coloring_family, satisfies_ccc, CccVerdict};
use fcomp_core::chargraph::{
    characteristic_graph, d_characteristic_graph, epsilon_restrict, extract_function_regions, multi_functional_graph,
    power_graph,
};
use fcomp_core::coloring::{
    best_coloring, first_violation, greedy_mis_coloring, min_entropy_coloring_exact,
    min_entropy_coloring_nonzero_case, min_entropy_coloring_quantization, refine, Coloring, ColoringReport,
    ExactOptions, Method,
};
use fcomp_core::graph::Graph;
use fcomp_core::graph_entropy::{
    conditional_graph_entropy, graph_entropy, is_chain_rule_proper, rate_lower_bound_tree, rate_region_one_stage,
    EntropyOptions,
};
use fcomp_core::model::{load_scenario, Scenario};
use fcomp_core::netsim::{
    build_plan, distortion_scheme, feedback_plan, simulate, simulate_distortion, simulate_feedback, PlanOptions,
    SimMode, SimReport, Strategy,
};
use fcomp_core::prob::{ProbTable, DEFAULT_BUDGET};
use fcomp_core::{fixtures, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "fcomp", version, about = "Functional compression over tree networks")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Enumeration budget for blocks, colorings and search spaces.
    #[arg(long, global = true, env = "FCOMP_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Input {
    /// Scenario file, or the name of a bundled scenario.
    scenario: String,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Print a characteristic graph (optionally a power, restriction or D-graph).
    Graph {
        #[command(flatten)]
        input: Input,
        /// Source, 1-based.
        #[arg(long, default_value_t = 1)]
        source: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Distortion level: build the D-characteristic graph instead.
        #[arg(long)]
        d: Option<f64>,
        /// Function to use, by name (default: the first).
        #[arg(long)]
        function: Option<String>,
    },
    /// Color a characteristic graph.
    Color {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        source: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ColorStrategy::Exact)]
        strategy: ColorStrategy,
        /// Largest graph the exact search accepts.
        #[arg(long, default_value_t = 26)]
        vertex_cap: usize,
        #[arg(long)]
        function: Option<String>,
    },
    /// Graph entropy of a characteristic graph.
    Entropy {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        source: usize,
        /// Condition on the other sources.
        #[arg(long)]
        conditional: bool,
        #[arg(long)]
        function: Option<String>,
    },
    /// Check the coloring connectivity condition for a pair of colorings.
    Ccc {
        #[command(flatten)]
        input: Input,
        /// Per-source colorings separated by ';': single, trivial, optimal, or a
        /// comma list of colors. One entry applies to every source.
        #[arg(long, default_value = "optimal")]
        coloring: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Rate region for sources sending directly to the receiver.
    Region {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Completed tree, per-stage lower bounds and the chain-rule check.
    TreeBound {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Build a coding plan and run it.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Two-mode scheme with a membership handshake.
    Feedback {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Lossy scheme at half the allowed distortion per source.
    Distortion {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        d: f64,
        #[arg(long, value_enum, default_value_t = PlanStrategy::Exact)]
        strategy: PlanStrategy,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Union of characteristic graphs over several functions.
    Multifunc {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        source: usize,
        /// NAME=SOURCES pairs, e.g. f1=2 or f2=2,3 (1-based). Default: every
        /// function with all other sources.
        #[arg(long = "with")]
        with: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ColorStrategy {
    Exact,
    SpecialCase,
    Quantization,
    Greedy,
    Refined,
    Best,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlanStrategy {
    Exact,
    SpecialCase,
    Greedy,
    Trivial,
}

impl From<PlanStrategy> for Strategy {
    fn from(s: PlanStrategy) -> Strategy {
        match s {
            PlanStrategy::Exact => Strategy::Exact,
            PlanStrategy::SpecialCase => Strategy::SpecialCase,
            PlanStrategy::Greedy => Strategy::Greedy,
            PlanStrategy::Trivial => Strategy::Trivial,
        }
    }
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = PlanStrategy::Exact)]
    strategy: PlanStrategy,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Intermediate nodes forward what they receive.
    #[arg(long)]
    relay: bool,
    /// Skip the class splitting that guarantees decodability.
    #[arg(long)]
    no_ccc: bool,
    #[arg(long)]
    function: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn mode(&self) -> SimMode {
        match self.mode {
            ModeArg::Exhaustive => SimMode::Exhaustive,
            ModeArg::Sampled => SimMode::Sampled {
                trials: self.trials,
                seed: self.seed,
            },
        }
    }
}

struct Report {
    text: String,
    json: Value,
}

fn f6(v: f64) -> String {
    let v = if v.abs() < 5e-7 { 0.0 } else { v };
    format!("{v:.6}")
}

fn load(name: &str) -> Result<Scenario> {
    if Path::new(name).exists() {
        load_scenario(name)
    } else {
        fixtures::bundled(name).map_err(|_| Error::invalid("scenario", format!("'{name}' is neither a file nor a bundled scenario (bundled: {})", fixtures::names().join(", "))))
    }
}

fn source_index(s: &Scenario, source: usize) -> Result<usize> {
    if source == 0 || source > s.sources() {
        return Err(Error::invalid(
            "source",
            format!("{source} is out of range 1..={}", s.sources()),
        ));
    }
    Ok(source - 1)
}

fn function_index(s: &Scenario, name: &Option<String>) -> Result<usize> {
    match name {
        None => Ok(0),
        Some(n) => s
            .function_index(n)
            .ok_or_else(|| Error::invalid("function", format!("no function named '{n}'"))),
    }
}

fn header(s: &Scenario) -> String {
    format!("scenario: {}\n", s.hash())
}

fn source_graph(s: &Scenario, fi: usize, i: usize) -> Result<Graph> {
    Ok(fcomp_core::chargraph::characteristic_graph_of(&s.model(fi)?, i))
}

fn cmd_graph(
    s: &Scenario,
    source: usize,
    n: usize,
    eps: f64,
    d: Option<f64>,
    function: &Option<String>,
    budget: u128,
) -> Result<Report> {
    let i = source_index(s, source)?;
    let base = match d {
        Some(level) => d_characteristic_graph(s, i, level)?,
        None => source_graph(s, function_index(s, function)?, i)?,
    };
    let g = power_graph(&base, n, budget)?;
    let r = epsilon_restrict(&g, eps)?;
    let mut text = header(s);
    writeln!(text, "source: X{source}").ok();
    writeln!(text, "n: {n}").ok();
    if let Some(level) = d {
        writeln!(text, "distortion level: {}", f6(level)).ok();
    }
    if eps > 0.0 {
        writeln!(text, "removed mass: {}", f6(r.removed_mass)).ok();
    }
    text.push_str(&r.graph.export());
    Ok(Report {
        json: json!({
            "scenario": s.hash(),
            "source": source,
            "n": n,
            "vertices": r.graph.n(),
            "labels": r.graph.labels(),
            "prob": r.graph.prob(),
            "edges": r.graph.edges(),
            "removed_mass": r.removed_mass,
        }),
        text,
    })
}

fn coloring_json(r: &ColoringReport) -> Value {
    json!({
        "method": r.method.to_string(),
        "entropy": r.entropy,
        "colors": r.coloring.colors(),
        "optimal": r.optimal,
        "nodes_explored": r.nodes_explored,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_color(
    s: &Scenario,
    source: usize,
    n: usize,
    eps: f64,
    strategy: ColorStrategy,
    vertex_cap: usize,
    function: &Option<String>,
    budget: u128,
) -> Result<Report> {
    let i = source_index(s, source)?;
    let fi = function_index(s, function)?;
    let g = power_graph(&source_graph(s, fi, i)?, n, budget)?;
    let r = epsilon_restrict(&g, eps)?;
    let opts = ExactOptions {
        vertex_cap,
        ..ExactOptions::default()
    };
    let report = match strategy {
        ColorStrategy::Exact => min_entropy_coloring_exact(&r.graph, &opts)?,
        ColorStrategy::SpecialCase => min_entropy_coloring_nonzero_case(&r.graph)?,
        ColorStrategy::Quantization => {
            if n != 1 || eps > 0.0 || fi != 0 {
                return Err(Error::invalid(
                    "strategy",
                    "the quantization coloring works on the first function at n = 1 without restriction",
                ));
            }
            min_entropy_coloring_quantization(s, i)?
        }
        ColorStrategy::Greedy => greedy_mis_coloring(&r.graph),
        ColorStrategy::Refined => {
            let c = refine(&r.graph, &greedy_mis_coloring(&r.graph).coloring);
            ColoringReport {
                entropy: c.entropy(r.graph.prob()),
                coloring: c,
                method: Method::GreedyRefined,
                nodes_explored: 0,
                optimal: false,
            }
        }
        ColorStrategy::Best => best_coloring(&r.graph, &opts),
    };
    let mut text = header(s);
    writeln!(text, "source: X{source}").ok();
    writeln!(text, "n: {n}").ok();
    writeln!(text, "vertices: {}", r.graph.n()).ok();
    if eps > 0.0 {
        writeln!(text, "removed mass: {}", f6(r.removed_mass)).ok();
    }
    writeln!(text, "{report}").ok();
    writeln!(text, "per-symbol entropy: {} bits", f6(report.entropy / n as f64)).ok();
    if strategy == ColorStrategy::Quantization {
        let regions = extract_function_regions(s)?;
        let blocks = if i == 0 { &regions.x1_blocks } else { &regions.x2_blocks };
        writeln!(text, "blocks: {blocks:?}").ok();
    }
    let mut json = coloring_json(&report);
    json["scenario"] = json!(s.hash());
    json["n"] = json!(n);
    json["per_symbol_entropy"] = json!(report.entropy / n as f64);
    Ok(Report { text, json })
}

fn cmd_entropy(s: &Scenario, source: usize, conditional: bool, function: &Option<String>) -> Result<Report> {
    let i = source_index(s, source)?;
    let fi = function_index(s, function)?;
    let g = source_graph(s, fi, i)?;
    let opts = EntropyOptions::default();
    let h = if conditional {
        let rest: Vec<usize> = (0..s.sources()).filter(|&j| j != i).collect();
        let t = s.table();
        let mut axes = vec![i];
        axes.extend(&rest);
        let m = t.marginal(&axes);
        let ny = m.data().len() / s.alphabets()[i];
        let joint = ProbTable::new(vec![s.alphabets()[i], ny.max(1)], m.data().to_vec())?;
        conditional_graph_entropy(&g, &joint, &opts)?
    } else {
        graph_entropy(&g, &opts)?
    };
    let mut text = header(s);
    writeln!(text, "source: X{source}").ok();
    let what = if conditional { "conditional graph entropy" } else { "graph entropy" };
    writeln!(text, "{what}: {} bits", f6(h.bits)).ok();
    writeln!(text, "maximal independent sets: {}", h.sets.len()).ok();
    writeln!(text, "iterations: {}", h.iterations()).ok();
    writeln!(text, "converged: {}", h.converged).ok();
    Ok(Report {
        json: json!({
            "scenario": s.hash(),
            "source": source,
            "conditional": conditional,
            "bits": h.bits,
            "sets": h.sets,
            "iterations": h.iterations(),
            "converged": h.converged,
        }),
        text,
    })
}

fn parse_colorings(spec: &str, s: &Scenario, n: usize, budget: u128) -> Result<Vec<Coloring>> {
    let parts: Vec<&str> = spec.split(';').map(str::trim).collect();
    let k = s.sources();
    if parts.len() != 1 && parts.len() != k {
        return Err(Error::invalid(
            "coloring",
            format!("{} entries for {k} sources", parts.len()),
        ));
    }
    (0..k)
        .map(|i| {
            let g = power_graph(&characteristic_graph(s, i)?, n, budget)?;
            let part = parts[if parts.len() == 1 { 0 } else { i }];
            let c = match part {
                "single" => Coloring::single(g.n()),
                "trivial" => Coloring::trivial(g.n()),
                "optimal" => best_coloring(&g, &ExactOptions::default()).coloring,
                list => {
                    let raw = list
                        .split(',')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::invalid("coloring", format!("'{list}': {e}")))?;
                    if raw.len() != g.n() {
                        return Err(Error::invalid(
                            "coloring",
                            format!("X{} needs {} colors, got {}", i + 1, g.n(), raw.len()),
                        ));
                    }
                    Coloring::new(raw)
                }
            };
            if let Some((u, v)) = first_violation(&g, &c) {
                return Err(Error::InvalidColoring(format!(
                    "X{}: symbols {u} and {v} are adjacent but share a color",
                    i + 1
                )));
            }
            Ok(c)
        })
        .collect()
}

fn tuple(v: &[usize]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

fn cmd_ccc(s: &Scenario, spec: &str, n: usize, budget: u128) -> Result<Report> {
    let colorings = parse_colorings(spec, s, n, budget)?;
    let model = s.model(0)?.block_extend(n, budget)?;
    let family = joint_coloring_family(&model, &colorings)?;
    let verdict = satisfies_ccc(&family)?;
    let zigzag = if s.sources() == 2 { Some(check_zigzag(&s.model(0)?)?) } else { None };
    let mut text = header(s);
    writeln!(text, "n: {n}").ok();
    for (i, c) in colorings.iter().enumerate() {
        writeln!(text, "coloring X{}: {c}", i + 1).ok();
    }
    writeln!(text, "classes: {}", family.classes.len()).ok();
    for c in &family.classes {
        writeln!(
            text,
            "class {}: {} points, {} components, mass {}",
            tuple(&c.colors),
            c.points.len(),
            c.components,
            f6(c.mass())
        )
        .ok();
    }
    match zigzag {
        Some(z) => writeln!(text, "zigzag: {}", if z { "holds" } else { "fails" }),
        None => writeln!(text, "zigzag: n/a"),
    }
    .ok();
    let mut json = json!({
        "scenario": s.hash(),
        "n": n,
        "colorings": colorings.iter().map(|c| c.colors().to_vec()).collect::<Vec<_>>(),
        "classes": family.classes.len(),
        "zigzag": zigzag,
    });
    match &verdict {
        CccVerdict::Satisfied => {
            writeln!(text, "C.C.C.: satisfied").ok();
            let lookup = build_lookup(&family).expect("condition holds");
            writeln!(text, "lookup:").ok();
            for (k, v) in &lookup.map {
                writeln!(text, "  {} -> {v}", tuple(k)).ok();
            }
            json["ccc"] = json!(true);
            json["lookup"] = json!(lookup
                .map
                .iter()
                .map(|(k, v)| json!({"colors": k, "value": v}))
                .collect::<Vec<_>>());
        }
        CccVerdict::Violated(w) => {
            writeln!(text, "C.C.C.: violated").ok();
            writeln!(text, "witness: {w}").ok();
            json["ccc"] = json!(false);
            json["witness"] = json!({"colors": w.colors, "a": w.a, "a_value": w.a_value, "b": w.b, "b_value": w.b_value});
        }
    }
    Ok(Report { text, json })
}

fn cmd_region(s: &Scenario, n: usize, budget: u128) -> Result<Report> {
    let region = rate_region_one_stage(s, n, budget)?;
    let mut text = header(s);
    writeln!(text, "n: {n}").ok();
    writeln!(text, "{region}").ok();
    Ok(Report {
        json: json!({
            "scenario": s.hash(),
            "n": n,
            "inequalities": region.inequalities.iter().map(|q| json!({
                "stage": q.stage, "subset": q.subset, "bound": q.bound, "label": q.label.to_string()
            })).collect::<Vec<_>>(),
        }),
        text,
    })
}

fn cmd_tree_bound(s: &Scenario, n: usize, budget: u128) -> Result<Report> {
    let tree = fcomp_core::netsim::complete_tree(s)?;
    let stages = rate_lower_bound_tree(s, n, budget)?;
    let chain = is_chain_rule_proper(s, n, 1e-9, budget)?;
    let mut text = header(s);
    writeln!(text, "n: {n}").ok();
    writeln!(text, "depth: {}", tree.depth).ok();
    writeln!(text, "auxiliary nodes: {}", tree.auxiliary_count()).ok();
    text.push_str(&tree.describe());
    let mut jstages = Vec::new();
    for st in &stages {
        let groups: Vec<String> = st
            .groups
            .iter()
            .map(|g| {
                let v: Vec<String> = g.iter().map(|x| format!("X{}", x + 1)).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        writeln!(text, "stage {} groups: {}", st.stage, groups.join(" ")).ok();
        writeln!(text, "{}", st.region).ok();
        jstages.push(json!({
            "stage": st.stage,
            "groups": st.groups,
            "inequalities": st.region.inequalities.iter().map(|q| json!({
                "subset": q.subset, "bound": q.bound, "label": q.label.to_string()
            })).collect::<Vec<_>>(),
        }));
    }
    for g in &chain.gaps {
        let v: Vec<String> = g.subset.iter().map(|x| format!("X{}", x + 1)).collect();
        writeln!(
            text,
            "chain rule {{{}}}: separate {} joint {}",
            v.join(","),
            f6(g.joint),
            f6(g.super_source)
        )
        .ok();
    }
    if let Some(sc) = chain.sufficient {
        writeln!(text, "sufficient condition: {}", if sc { "holds" } else { "fails" }).ok();
    }
    writeln!(text, "chain-rule proper: {}", chain.proper).ok();
    Ok(Report {
        json: json!({
            "scenario": s.hash(),
            "n": n,
            "depth": tree.depth,
            "stages": jstages,
            "chain_rule_proper": chain.proper,
            "gaps": chain.gaps.iter().map(|g| json!({"subset": g.subset, "separate": g.joint, "joint": g.super_source})).collect::<Vec<_>>(),
        }),
        text,
    })
}

fn sim_json(r: &SimReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn cmd_simulate(s: &Scenario, plan: &PlanArgs, run: &RunArgs, budget: u128) -> Result<Report> {
    let opts = PlanOptions {
        n: plan.n,
        strategy: plan.strategy.into(),
        relay: plan.relay,
        eps: plan.eps,
        enforce_ccc: !plan.no_ccc,
        budget,
        exact: ExactOptions::default(),
        function: function_index(s, &plan.function)?,
    };
    let p = build_plan(s, &opts)?;
    let report = simulate(s, &p, run.mode())?;
    let mut text = format!("{report}");
    writeln!(text, "strategy: {}", opts.strategy).ok();
    writeln!(text, "class splits: {}", p.repairs).ok();
    writeln!(text, "decodable: {}", p.decodable).ok();
    writeln!(text, "lookup rows: {}", p.lookup.len()).ok();
    let mut json = sim_json(&report);
    json["class_splits"] = json!(p.repairs);
    json["decodable"] = json!(p.decodable);
    Ok(Report { text, json })
}

fn cmd_feedback(s: &Scenario, n: usize, run: &RunArgs, budget: u128) -> Result<Report> {
    let plan = feedback_plan(s, n, budget)?;
    let report = simulate_feedback(s, &plan, run.mode())?;
    let mut text = String::new();
    for (i, c) in plan.c_min.iter().enumerate() {
        writeln!(text, "c_min X{}: {c}", i + 1).ok();
    }
    for (i, c) in plan.c_prime.iter().enumerate() {
        writeln!(text, "c' X{}: {c}", i + 1).ok();
    }
    writeln!(text, "H(c_min): {} bits", f6(plan.h_min)).ok();
    writeln!(text, "H(c'): {} bits", f6(plan.h_prime)).ok();
    writeln!(text, "A_X1: {:?}", plan.a_x1).ok();
    writeln!(text, "A_X2: {:?}", plan.a_x2).ok();
    text.push_str(&report.to_string());
    let mut json = sim_json(&report);
    json["h_min"] = json!(plan.h_min);
    json["h_prime"] = json!(plan.h_prime);
    Ok(Report { text, json })
}

fn cmd_distortion(s: &Scenario, d: f64, strategy: PlanStrategy, run: &RunArgs) -> Result<Report> {
    let scheme = distortion_scheme(s, d, strategy.into())?;
    let report = simulate_distortion(s, &scheme, run.mode())?;
    let mut text = format!("D: {}\n", f6(d));
    for i in 0..2 {
        let edges: Vec<String> = scheme.graphs[i].edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
        writeln!(text, "graph X{} at D/2: edges [{}]", i + 1, edges.join(" ")).ok();
        writeln!(text, "coloring X{}: {}", i + 1, scheme.colorings[i]).ok();
    }
    writeln!(text, "decoder:").ok();
    for ((a, b), z) in &scheme.decoder {
        writeln!(text, "  ({a},{b}) -> {z}").ok();
    }
    text.push_str(&report.to_string());
    let mut json = sim_json(&report);
    json["d"] = json!(d);
    json["edges"] = json!(scheme.graphs.iter().map(|g| g.edges()).collect::<Vec<_>>());
    Ok(Report { text, json })
}

fn cmd_multifunc(s: &Scenario, source: usize, with: &[String]) -> Result<Report> {
    let x = source_index(s, source)?;
    let pairs: Vec<(usize, Vec<usize>)> = if with.is_empty() {
        (0..s.functions().len())
            .map(|fi| (fi, (0..s.sources()).filter(|&j| j != x).collect()))
            .collect()
    } else {
        with.iter()
            .map(|w| {
                let (name, srcs) = w
                    .split_once('=')
                    .ok_or_else(|| Error::invalid("with", format!("'{w}' is not NAME=SOURCES")))?;
                let fi = function_index(s, &Some(name.to_string()))?;
                let side = srcs
                    .split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::invalid("with", format!("'{t}': {e}")))
                            .and_then(|v| source_index(s, v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((fi, side))
            })
            .collect::<Result<_>>()?
    };
    let g = multi_functional_graph(s, x, &pairs)?;
    let c = best_coloring(&g, &ExactOptions::default());
    let mut text = header(s);
    writeln!(text, "source: X{source}").ok();
    for (fi, side) in &pairs {
        let v: Vec<String> = side.iter().map(|y| format!("X{}", y + 1)).collect();
        writeln!(text, "function {} with side information {{{}}}", s.functions()[*fi].name, v.join(",")).ok();
    }
    text.push_str(&g.export());
    writeln!(text, "{c}").ok();
    let mut json = coloring_json(&c);
    json["edges"] = json!(g.edges());
    Ok(Report { text, json })
}

fn run(cli: &Cli) -> Result<Report> {
    let b = cli.budget;
    match &cli.verb {
        Verb::Graph {
            input,
            source,
            n,
            eps,
            d,
            function,
        } => cmd_graph(&load(&input.scenario)?, *source, *n, *eps, *d, function, b),
        Verb::Color {
            input,
            source,
            n,
            eps,
            strategy,
            vertex_cap,
            function,
        } => cmd_color(&load(&input.scenario)?, *source, *n, *eps, *strategy, *vertex_cap, function, b),
        Verb::Entropy {
            input,
            source,
            conditional,
            function,
        } => cmd_entropy(&load(&input.scenario)?, *source, *conditional, function),
        Verb::Ccc { input, coloring, n } => cmd_ccc(&load(&input.scenario)?, coloring, *n, b),
        Verb::Region { input, n } => cmd_region(&load(&input.scenario)?, *n, b),
        Verb::TreeBound { input, n } => cmd_tree_bound(&load(&input.scenario)?, *n, b),
        Verb::Simulate { input, plan, run } => cmd_simulate(&load(&input.scenario)?, plan, run, b),
        Verb::Feedback { input, n, run } => cmd_feedback(&load(&input.scenario)?, *n, run, b),
        Verb::Distortion {
            input,
            d,
            strategy,
            run,
        } => cmd_distortion(&load(&input.scenario)?, *d, *strategy, run),
        Verb::Multifunc { input, source, with } => cmd_multifunc(&load(&input.scenario)?, *source, with),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_budget() { 2 } else { 1 });
        }
    };
    let body = match cli.format {
        Format::Text => report.text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("json")),
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, body) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::SUCCESS
}
