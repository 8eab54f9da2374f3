//! Coding plans: colorings at every node of a completed tree plus the
//! receiver's lookup table.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::ccc::{
    build_lookup, build_lookup_lenient, joint_coloring_family_on, satisfies_ccc, CccVerdict, JointColoringFamily,
    LookupTable,
};
use crate::chargraph::{characteristic_graph_of, epsilon_restrict, power_graph};
use crate::coloring::{
    greedy_mis_coloring, min_entropy_coloring_exact, min_entropy_coloring_nonzero_case, Coloring, ColoringReport,
    ExactOptions, Method,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{JointModel, Scenario};
use crate::netsim::tree::{complete_tree, CompletedTree};
use crate::prob::{encode, entropy_of, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exact,
    /// Closed-form optimal coloring when the graph allows it, exact search otherwise.
    SpecialCase,
    Greedy,
    /// Identity colorings: sources send symbols, relays forward what they receive.
    Trivial,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Strategy::Exact),
            "special-case" | "special" => Ok(Strategy::SpecialCase),
            "greedy" => Ok(Strategy::Greedy),
            "trivial" | "relay" => Ok(Strategy::Trivial),
            _ => Err(Error::invalid(
                "strategy",
                format!("unknown strategy '{s}' (exact, special-case, greedy, trivial)"),
            )),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exact => "exact",
            Strategy::SpecialCase => "special-case",
            Strategy::Greedy => "greedy",
            Strategy::Trivial => "trivial",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOptions {
    pub n: usize,
    pub strategy: Strategy,
    /// Intermediate nodes forward received colors unchanged.
    pub relay: bool,
    /// Source graphs are restricted to drop up to this much mass.
    pub eps: f64,
    /// Split color classes until the receiver can decode.
    pub enforce_ccc: bool,
    pub budget: u128,
    pub exact: ExactOptions,
    pub function: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            n: 1,
            strategy: Strategy::Exact,
            relay: false,
            eps: 0.0,
            enforce_ccc: true,
            budget: DEFAULT_BUDGET,
            exact: ExactOptions::default(),
            function: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeRule {
    /// Colors the block of one source; units are block symbols.
    Source { source: usize },
    /// Colors the tuple of colors received from the children (in child order).
    Recolor { units: BTreeMap<Vec<usize>, usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePlan {
    pub node: usize,
    pub stage: usize,
    pub children: Vec<usize>,
    pub rule: NodeRule,
    /// Coloring of the node's units.
    pub coloring: Coloring,
    pub method: Method,
    /// Analytic rate of the outgoing link in bits per source symbol.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub tree: CompletedTree,
    pub options: PlanOptions,
    pub base: JointModel,
    pub block: JointModel,
    pub nodes: BTreeMap<usize, NodePlan>,
    /// Nodes ordered deepest first, so children precede parents.
    pub order: Vec<usize>,
    pub lookup: LookupTable,
    /// Class splits performed to restore decodability.
    pub repairs: usize,
    /// Whether the stage-one coloring family satisfies the connectivity condition.
    pub decodable: bool,
    /// Per source, which block symbols survive the eps restriction.
    pub kept: Vec<Vec<bool>>,
}

impl Plan {
    /// Color sent by every node for one block input; `None` where a relay
    /// receives a tuple it was not designed for.
    pub fn node_colors(&self, coords: &[usize]) -> HashMap<usize, Option<usize>> {
        let mut out: HashMap<usize, Option<usize>> = HashMap::with_capacity(self.order.len());
        for &v in &self.order {
            let p = &self.nodes[&v];
            let c = match &p.rule {
                NodeRule::Source { source } => Some(p.coloring.color(coords[*source])),
                NodeRule::Recolor { units } => {
                    let tuple: Option<Vec<usize>> = p.children.iter().map(|c| out[c]).collect();
                    tuple.and_then(|t| units.get(&t).map(|&u| p.coloring.color(u)))
                }
            };
            out.insert(v, c);
        }
        out
    }

    /// Receiver output for a block input, `None` on a decoding failure.
    pub fn decode(&self, coords: &[usize]) -> Option<u64> {
        let colors = self.node_colors(coords);
        let first: Option<Vec<usize>> = self.tree.stage_nodes(1).iter().map(|v| colors[v]).collect();
        first.and_then(|t| self.lookup.decode(&t))
    }

    pub fn stage_sum_rate(&self, stage: usize) -> f64 {
        let nodes = self.tree.stage_nodes(stage);
        let mut dist: HashMap<Vec<usize>, f64> = HashMap::new();
        for cell in self.block.support() {
            let colors = self.node_colors(&self.block.coords(cell));
            let key: Vec<usize> = nodes.iter().map(|v| colors[v].unwrap_or(usize::MAX)).collect();
            *dist.entry(key).or_default() += self.block.pmf()[cell];
        }
        entropy_of(&dist.values().copied().collect::<Vec<_>>()) / self.options.n as f64
    }
}

/// Per-time tuples of the sources in `group`, read as one sequence index.
pub(crate) fn group_value(coords: &[usize], group: &[usize], base: &[usize], n: usize) -> usize {
    let width: usize = group.iter().map(|&s| base[s]).product();
    let mut v = 0;
    for t in 0..n {
        let mut tuple = 0;
        for &s in group {
            let digit = coords[s] / base[s].pow((n - 1 - t) as u32) % base[s];
            tuple = tuple * base[s] + digit;
        }
        v = v * width + tuple;
    }
    v
}

fn color_graph(g: &Graph, strategy: Strategy, opts: &ExactOptions) -> Result<ColoringReport> {
    match strategy {
        Strategy::Exact => min_entropy_coloring_exact(g, opts),
        Strategy::SpecialCase => match min_entropy_coloring_nonzero_case(g) {
            Ok(r) => Ok(r),
            Err(Error::NotApplicable(_)) => min_entropy_coloring_exact(g, opts),
            Err(e) => Err(e),
        },
        Strategy::Greedy => Ok(greedy_mis_coloring(g)),
        Strategy::Trivial => {
            let coloring = Coloring::trivial(g.n());
            Ok(ColoringReport {
                entropy: coloring.entropy(g.prob()),
                coloring,
                method: Method::Trivial,
                nodes_explored: 0,
                optimal: false,
            })
        }
    }
}

pub fn build_plan(scenario: &Scenario, options: &PlanOptions) -> Result<Plan> {
    build_plan_with(scenario, options, None)
}

/// Builds a plan; `source_colorings` overrides the per-source coloring search.
pub fn build_plan_with(
    scenario: &Scenario,
    options: &PlanOptions,
    source_colorings: Option<&[Coloring]>,
) -> Result<Plan> {
    let n = options.n;
    let tree = complete_tree(scenario)?;
    let base = scenario.model(options.function)?;
    let block = base.block_extend(n, options.budget)?;
    let k = base.k();
    let base_alph = base.alphabets().to_vec();
    let support = block.support();
    let coords: Vec<Vec<usize>> = support.iter().map(|&c| block.coords(c)).collect();
    let probs: Vec<f64> = support.iter().map(|&c| block.pmf()[c]).collect();
    if let Some(c) = source_colorings {
        if c.len() != k || c.iter().zip(block.alphabets()).any(|(c, &a)| c.len() != a) {
            return Err(Error::invalid("colorings", "one coloring per source over its block alphabet"));
        }
    }

    let mut kept = vec![Vec::new(); k];
    let mut plans: BTreeMap<usize, NodePlan> = BTreeMap::new();
    // unit of every support cell at each node
    let mut units_of: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut repairs = 0;
    let mut decodable = true;
    let mut last_family: Option<JointColoringFamily> = None;
    // canonical color of each cut coloring back to the color the node sends
    let mut back: Vec<HashMap<usize, usize>> = Vec::new();

    for stage in (1..=tree.depth).rev() {
        let stage_nodes = tree.stage_nodes(stage);
        for &v in &stage_nodes {
            let node = &tree.nodes[v];
            if let Some(s) = node.source {
                let g = power_graph(&characteristic_graph_of(&base, s), n, options.budget)?;
                let (coloring, method) = match source_colorings {
                    Some(c) => (c[s].clone(), Method::Trivial),
                    None if options.eps > 0.0 => {
                        let r = epsilon_restrict(&g, options.eps)?;
                        let report = color_graph(&r.graph, options.strategy, &options.exact)?;
                        let junk = report.coloring.count();
                        let mut raw = vec![junk; g.n()];
                        for (i, &orig) in r.kept.iter().enumerate() {
                            raw[orig] = report.coloring.color(i);
                        }
                        (Coloring::new(raw), report.method)
                    }
                    None => {
                        let report = color_graph(&g, options.strategy, &options.exact)?;
                        (report.coloring, report.method)
                    }
                };
                kept[s] = match (source_colorings, options.eps > 0.0) {
                    (None, true) => {
                        let r = epsilon_restrict(&g, options.eps)?;
                        let mut m = vec![false; g.n()];
                        r.kept.iter().for_each(|&i| m[i] = true);
                        m
                    }
                    _ => vec![true; g.n()],
                };
                units_of.insert(v, coords.iter().map(|c| c[s]).collect());
                plans.insert(
                    v,
                    NodePlan {
                        node: v,
                        stage,
                        children: Vec::new(),
                        rule: NodeRule::Source { source: s },
                        coloring,
                        method,
                        rate: 0.0,
                    },
                );
                continue;
            }

            let mut children = node.children.clone();
            children.sort_by_key(|&c| tree.nodes[c].below[0]);
            let child_colors: Vec<Vec<usize>> = children
                .iter()
                .map(|c| {
                    let p = &plans[c];
                    units_of[c].iter().map(|&u| p.coloring.color(u)).collect()
                })
                .collect();
            let tuples: Vec<Vec<usize>> = (0..support.len())
                .map(|i| child_colors.iter().map(|cc| cc[i]).collect())
                .collect();
            let mut units: BTreeMap<Vec<usize>, usize> = tuples.iter().map(|t| (t.clone(), 0)).collect();
            for (i, u) in units.values_mut().enumerate() {
                *u = i;
            }
            let unit_of: Vec<usize> = tuples.iter().map(|t| units[t]).collect();

            let (coloring, method) = if options.relay || options.strategy == Strategy::Trivial {
                (Coloring::trivial(units.len()), Method::Trivial)
            } else {
                // quotient graph: received tuples, adjacent when some of the
                // source blocks behind them are adjacent in the node's power graph
                let group = node.below.clone();
                let mut groups = vec![group.clone()];
                groups.extend((0..k).filter(|s| !group.contains(s)).map(|s| vec![s]));
                let gp = power_graph(&characteristic_graph_of(&base.group(&groups)?, 0), n, options.budget)?;
                let mut members: Vec<HashSet<usize>> = vec![HashSet::new(); units.len()];
                let mut mass = vec![0.0; units.len()];
                for i in 0..support.len() {
                    members[unit_of[i]].insert(group_value(&coords[i], &group, &base_alph, n));
                    mass[unit_of[i]] += probs[i];
                }
                let members: Vec<Vec<usize>> = members
                    .into_iter()
                    .map(|m| {
                        let mut v: Vec<usize> = m.into_iter().collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                let mut edges = Vec::new();
                for a in 0..units.len() {
                    for b in a + 1..units.len() {
                        if members[a].iter().any(|&x| members[b].iter().any(|&y| gp.has_edge(x, y))) {
                            edges.push((a, b));
                        }
                    }
                }
                let labels: Vec<Vec<usize>> = units.keys().cloned().collect();
                let q = Graph::new(labels, mass, edges);
                let report = color_graph(&q, options.strategy, &options.exact)?;
                (report.coloring, report.method)
            };
            units_of.insert(v, unit_of);
            plans.insert(
                v,
                NodePlan {
                    node: v,
                    stage,
                    children,
                    rule: NodeRule::Recolor { units },
                    coloring,
                    method,
                    rate: 0.0,
                },
            );
        }

        // decodability across this stage's cut
        let groups = tree.connection_set(stage);
        let cut = base.group(&groups)?.block_extend(n, options.budget)?;
        let gvs: Vec<Vec<usize>> = coords
            .iter()
            .map(|c| groups.iter().map(|g| group_value(c, g, &base_alph, n)).collect())
            .collect();
        let kept_cells: HashSet<usize> = (0..support.len())
            .filter(|&i| (0..k).all(|s| kept[s][coords[i][s]]))
            .map(|i| encode(cut.alphabets(), &gvs[i]))
            .collect();
        loop {
            let raws: Vec<Vec<usize>> = stage_nodes
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let p = &plans[v];
                    let spare = p.coloring.count();
                    let mut raw = vec![spare; cut.alphabets()[j]];
                    for (i, &u) in units_of[v].iter().enumerate() {
                        raw[gvs[i][j]] = p.coloring.color(u);
                    }
                    raw
                })
                .collect();
            let colorings: Vec<Coloring> = raws.iter().map(|r| Coloring::new(r.clone())).collect();
            back = raws
                .iter()
                .zip(&colorings)
                .map(|(r, c)| r.iter().enumerate().map(|(gv, &x)| (c.color(gv), x)).collect())
                .collect();
            let family = joint_coloring_family_on(&cut, &colorings, |c| kept_cells.contains(&c))?;
            let verdict = satisfies_ccc(&family);
            if !options.enforce_ccc {
                decodable = matches!(verdict, Ok(CccVerdict::Satisfied));
                last_family = Some(family);
                break;
            }
            match verdict? {
                CccVerdict::Satisfied => {
                    last_family = Some(family);
                    break;
                }
                CccVerdict::Violated(w) => {
                    let unit_at = |j: usize, gv: usize| -> usize {
                        let v = stage_nodes[j];
                        let i = gvs.iter().position(|g| g[j] == gv).expect("witness comes from the support");
                        units_of[&v][i]
                    };
                    let j = (0..groups.len())
                        .find(|&j| unit_at(j, w.a[j]) != unit_at(j, w.b[j]))
                        .ok_or_else(|| Error::InvalidColoring(format!("cannot separate {w}")))?;
                    let v = stage_nodes[j];
                    let u = unit_at(j, w.b[j]);
                    let p = plans.get_mut(&v).expect("planned");
                    let mut raw = p.coloring.colors().to_vec();
                    raw[u] = p.coloring.count();
                    p.coloring = Coloring::new(raw);
                    repairs += 1;
                }
            }
        }
    }

    let family = last_family.expect("at least one stage");
    let canonical = if options.enforce_ccc {
        build_lookup(&family).map_err(|w| Error::InvalidColoring(format!("receiver cannot decode: {w}")))?
    } else {
        build_lookup_lenient(&family)
    };
    let lookup = LookupTable {
        map: canonical
            .map
            .into_iter()
            .map(|(key, z)| (key.iter().enumerate().map(|(j, c)| back[j][c]).collect(), z))
            .collect(),
    };

    for (v, p) in plans.iter_mut() {
        let mut dist: HashMap<usize, f64> = HashMap::new();
        for (i, &u) in units_of[v].iter().enumerate() {
            *dist.entry(p.coloring.color(u)).or_default() += probs[i];
        }
        p.rate = entropy_of(&dist.values().copied().collect::<Vec<_>>()) / n as f64;
    }
    let mut order: Vec<usize> = plans.keys().copied().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.nodes[v].depth));
    Ok(Plan {
        tree,
        options: options.clone(),
        base,
        block,
        nodes: plans,
        order,
        lookup,
        repairs,
        decodable,
        kept,
    })
}
