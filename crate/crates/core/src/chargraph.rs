//! Characteristic graphs and the graph constructions built on them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{JointModel, Scenario};
use crate::prob::{checked_product, decode, strides, INTERNAL_TOL};

/// Graph on coordinate `i` of `model`: `a ~ b` when some assignment of the
/// other coordinates has positive probability with both and `differ` holds
/// for the two outputs.
pub fn confusability_graph(model: &JointModel, i: usize, differ: impl Fn(u64, u64) -> bool) -> Graph {
    let dims = model.alphabets();
    let a_i = dims[i];
    let stride = strides(dims)[i];
    let hi_count = model.cells() / (a_i * stride);
    let pmf = model.pmf();
    let values = model.values();
    let mut edges = BTreeSet::new();
    let mut present: Vec<(usize, u64)> = Vec::with_capacity(a_i);
    for hi in 0..hi_count {
        for lo in 0..stride {
            present.clear();
            for x in 0..a_i {
                let cell = hi * a_i * stride + x * stride + lo;
                if pmf[cell] > 0.0 {
                    present.push((x, values[cell]));
                }
            }
            for (j, &(a, fa)) in present.iter().enumerate() {
                for &(b, fb) in &present[j + 1..] {
                    if differ(fa, fb) {
                        edges.insert((a, b));
                    }
                }
            }
        }
    }
    let labels = (0..a_i).map(|x| vec![x]).collect();
    Graph::new(labels, model.marginal(i), edges)
}

pub fn characteristic_graph_of(model: &JointModel, i: usize) -> Graph {
    confusability_graph(model, i, |a, b| a != b)
}

/// Characteristic graph of source `i` for the scenario's first function.
pub fn characteristic_graph(scenario: &Scenario, i: usize) -> Result<Graph> {
    characteristic_graph_for(scenario, 0, i)
}

pub fn characteristic_graph_for(scenario: &Scenario, function: usize, i: usize) -> Result<Graph> {
    check_source(scenario, i)?;
    Ok(characteristic_graph_of(&scenario.model(function)?, i))
}

fn check_source(scenario: &Scenario, i: usize) -> Result<()> {
    if i >= scenario.sources() {
        return Err(Error::invalid(
            "source",
            format!("source index {i} out of range ({} sources)", scenario.sources()),
        ));
    }
    Ok(())
}

/// n-th power: sequences are adjacent when some coordinate pair is an edge.
/// Vertex probabilities are products of the base probabilities.
pub fn power_graph(g: &Graph, n: usize, budget: u128) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n", "block length must be at least 1"));
    }
    if n == 1 {
        return Ok(g.clone());
    }
    let base = g.n();
    let total = checked_product("power graph vertices", &vec![base; n], budget)?;
    // pair checks grow quadratically; keep them under a generous multiple of the budget
    let pairs = (total as u128) * (total as u128) / 2;
    if pairs > budget.saturating_mul(100) {
        return Err(Error::budget("power graph vertex pairs", pairs, budget * 100));
    }
    let dims = vec![base; n];
    let seqs: Vec<Vec<usize>> = (0..total).map(|v| decode(&dims, v)).collect();
    let prob = seqs
        .iter()
        .map(|s| s.iter().map(|&x| g.prob()[x]).product())
        .collect();
    let mut edges = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            if seqs[u].iter().zip(&seqs[v]).any(|(&a, &b)| a != b && g.has_edge(a, b)) {
                edges.push((u, v));
            }
        }
    }
    let labels = seqs
        .iter()
        .map(|s| s.iter().flat_map(|&x| g.labels()[x].iter().copied()).collect())
        .collect();
    Ok(Graph::new(labels, prob, edges))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    /// Induced subgraph on the kept vertices (original probabilities, not renormalized).
    pub graph: Graph,
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub removed_mass: f64,
}

/// Drop the lightest vertices while their total mass stays within `eps`.
pub fn epsilon_restrict(g: &Graph, eps: f64) -> Result<Restriction> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid("eps", format!("{eps} is outside [0, 1)")));
    }
    let mut removed = Vec::new();
    let mut mass = 0.0;
    if eps > 0.0 {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| g.prob()[a].total_cmp(&g.prob()[b]).then(a.cmp(&b)));
        for v in order {
            if mass + g.prob()[v] <= eps + INTERNAL_TOL {
                mass += g.prob()[v];
                removed.push(v);
            } else {
                break;
            }
        }
    }
    removed.sort_unstable();
    let kept: Vec<usize> = (0..g.n()).filter(|v| removed.binary_search(v).is_err()).collect();
    Ok(Restriction {
        graph: g.induced(&kept),
        kept,
        removed,
        removed_mass: mass,
    })
}

/// Edge when the two outputs are more than `level` apart under the scenario's distortion.
pub fn d_characteristic_graph(scenario: &Scenario, i: usize, level: f64) -> Result<Graph> {
    check_source(scenario, i)?;
    let d = scenario
        .distortion()
        .ok_or_else(|| Error::invalid("distortion", "scenario has no distortion table"))?;
    if !level.is_finite() || level < 0.0 {
        return Err(Error::invalid("D", format!("{level} must be a nonnegative number")));
    }
    let model = scenario.model(0)?;
    Ok(confusability_graph(&model, i, |a, b| {
        d[a as usize][b as usize] > level
    }))
}

/// One function of interest `f(x, y)` together with its side information `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionContext {
    pub x_alphabet: usize,
    pub y_alphabet: usize,
    /// Joint pmf of `(x, y)`, `x` major.
    pub pmf: Vec<f64>,
    pub table: Vec<u64>,
}

/// Union of the characteristic graphs of `x` for each function in `parts`.
pub fn multi_functional_graph_of(parts: &[FunctionContext]) -> Result<Graph> {
    let first = parts
        .first()
        .ok_or_else(|| Error::invalid("functions", "at least one function is required"))?;
    let nx = first.x_alphabet;
    let mut marginal = vec![0.0; nx];
    for (x, m) in marginal.iter_mut().enumerate() {
        *m = first.pmf[x * first.y_alphabet..(x + 1) * first.y_alphabet].iter().sum();
    }
    let mut edges = Vec::new();
    for (j, part) in parts.iter().enumerate() {
        if part.x_alphabet != nx {
            return Err(Error::invalid(
                "functions",
                format!("function {j} has an X alphabet of {} symbols, expected {nx}", part.x_alphabet),
            ));
        }
        let cells = nx * part.y_alphabet;
        if part.pmf.len() != cells || part.table.len() != cells {
            return Err(Error::invalid("functions", format!("function {j} tables have the wrong size")));
        }
        let model = JointModel::new(vec![nx, part.y_alphabet], part.pmf.clone(), part.table.clone())?;
        edges.extend(characteristic_graph_of(&model, 0).edges());
    }
    Ok(Graph::simple(marginal, edges))
}

/// Multi-functional graph of source `x` where function `fi` is paired with
/// the side variables `side` (jointly, as one tuple).
pub fn multi_functional_graph(
    scenario: &Scenario,
    x: usize,
    functions: &[(usize, Vec<usize>)],
) -> Result<Graph> {
    check_source(scenario, x)?;
    let mut parts = Vec::new();
    for (fi, side) in functions {
        for &y in side {
            check_source(scenario, y)?;
            if y == x {
                return Err(Error::invalid("side", "side information cannot include the source itself"));
            }
        }
        let model = scenario.model(*fi)?;
        let dims = model.alphabets();
        let ny: usize = side.iter().map(|&y| dims[y]).product();
        let mut pmf = vec![0.0; dims[x] * ny];
        let mut table: Vec<Option<u64>> = vec![None; dims[x] * ny];
        for cell in 0..model.cells() {
            let c = model.coords(cell);
            let yv = side.iter().fold(0, |acc, &y| acc * dims[y] + c[y]);
            let idx = c[x] * ny + yv;
            pmf[idx] += model.pmf()[cell];
            match table[idx] {
                None => table[idx] = Some(model.values()[cell]),
                Some(v) if v != model.values()[cell] => {
                    return Err(Error::invalid(
                        "functions",
                        format!(
                            "function '{}' depends on sources outside its side information",
                            scenario.functions()[*fi].name
                        ),
                    ))
                }
                _ => {}
            }
        }
        parts.push(FunctionContext {
            x_alphabet: dims[x],
            y_alphabet: ny,
            pmf,
            table: table.into_iter().map(|v| v.unwrap_or(0)).collect(),
        });
    }
    multi_functional_graph_of(&parts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionRegion {
    pub x1_block: usize,
    pub x2_block: usize,
    pub value: u64,
}

/// Rectangular decomposition of a two-source function.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAnalysis {
    /// Maximal groups of `x1` symbols with identical rows of `f`.
    pub x1_blocks: Vec<Vec<usize>>,
    pub x2_blocks: Vec<Vec<usize>>,
    pub regions: Vec<FunctionRegion>,
    /// Every output's preimage is a single product set.
    pub is_quantization: bool,
    /// `proper[a][b]`: every pair drawn from x1 blocks `a` and `b` is separated
    /// by some `x2` with positive probability. Diagonal entries are true.
    pub proper: Vec<Vec<bool>>,
}

pub fn extract_function_regions(scenario: &Scenario) -> Result<RegionAnalysis> {
    if scenario.sources() != 2 {
        return Err(Error::invalid("sources", "function regions need exactly two sources"));
    }
    let model = scenario.model(0)?;
    let (n1, n2) = (model.alphabets()[0], model.alphabets()[1]);
    let f = |a: usize, b: usize| model.values()[a * n2 + b];
    let p = |a: usize, b: usize| model.pmf()[a * n2 + b];

    let group = |count: usize, key: &dyn Fn(usize) -> Vec<u64>| -> Vec<Vec<usize>> {
        let mut by_key: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..count {
            let k = key(x);
            match by_key.get(&k) {
                Some(&b) => blocks[b].push(x),
                None => {
                    by_key.insert(k, blocks.len());
                    blocks.push(vec![x]);
                }
            }
        }
        blocks
    };
    let x1_blocks = group(n1, &|a| (0..n2).map(|b| f(a, b)).collect());
    let x2_blocks = group(n2, &|b| (0..n1).map(|a| f(a, b)).collect());

    let mut regions = Vec::new();
    for (i, r) in x1_blocks.iter().enumerate() {
        for (j, c) in x2_blocks.iter().enumerate() {
            regions.push(FunctionRegion {
                x1_block: i,
                x2_block: j,
                value: f(r[0], c[0]),
            });
        }
    }

    let mut is_quantization = true;
    let values: BTreeSet<u64> = regions.iter().map(|r| r.value).collect();
    for v in values {
        let rows: BTreeSet<usize> = regions.iter().filter(|r| r.value == v).map(|r| r.x1_block).collect();
        let cols: BTreeSet<usize> = regions.iter().filter(|r| r.value == v).map(|r| r.x2_block).collect();
        let count = regions.iter().filter(|r| r.value == v).count();
        if count != rows.len() * cols.len() {
            is_quantization = false;
        }
    }

    let nb = x1_blocks.len();
    let mut proper = vec![vec![true; nb]; nb];
    for i in 0..nb {
        for j in i + 1..nb {
            let ok = x1_blocks[i].iter().all(|&a| {
                x1_blocks[j]
                    .iter()
                    .all(|&b| (0..n2).any(|y| p(a, y) > 0.0 && p(b, y) > 0.0 && f(a, y) != f(b, y)))
            });
            proper[i][j] = ok;
            proper[j][i] = ok;
        }
    }
    Ok(RegionAnalysis {
        x1_blocks,
        x2_blocks,
        regions,
        is_quantization,
        proper,
    })
}
