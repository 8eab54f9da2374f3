//! Graph entropies and the rate bounds derived from them.
//!
//! `graph_entropy` computes `min I(X; W)` over `W` ranging over maximal
//! independent sets containing `X` by alternating minimization. The finite-n
//! quantities minimize coloring entropies over valid colorings of power
//! graphs subject to the connectivity condition; they upper bound the
//! asymptotic values and are labelled as such.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::ccc::{joint_coloring_family, satisfies_ccc};
use crate::chargraph::{characteristic_graph_of, power_graph};
use crate::coloring::{best_coloring, enumerate_colorings, Coloring, ExactOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{JointModel, Scenario};
use crate::netsim::tree::complete_tree;
use crate::prob::{entropy_of, ProbTable, INTERNAL_TOL};

/// Maximal independent sets by Bron–Kerbosch with pivoting on the complement,
/// sorted lexicographically.
pub fn maximal_independent_sets(g: &Graph, budget: u128) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    if n > 128 {
        return Err(Error::budget("independent set enumeration vertices", n as u128, 128));
    }
    let all: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    // non-neighbours in g = neighbours in the complement
    let co: Vec<u128> = (0..n)
        .map(|v| {
            let adj = g.neighbors(v).iter().fold(0u128, |m, &u| m | 1 << u);
            all & !adj & !(1u128 << v)
        })
        .collect();
    let mut out = Vec::new();
    fn bk(r: u128, mut p: u128, mut x: u128, co: &[u128], out: &mut Vec<u128>, budget: u128) -> Result<()> {
        if p == 0 && x == 0 {
            if out.len() as u128 >= budget {
                return Err(Error::budget("maximal independent sets", budget + 1, budget));
            }
            out.push(r);
            return Ok(());
        }
        let px = p | x;
        let pivot = (0..128)
            .filter(|&u| px >> u & 1 == 1)
            .max_by_key(|&u| ((p & co[u]).count_ones(), std::cmp::Reverse(u)))
            .expect("p or x is nonempty");
        let mut cand = p & !co[pivot];
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            bk(r | 1 << v, p & co[v], x & co[v], co, out, budget)?;
            p &= !(1u128 << v);
            x |= 1u128 << v;
        }
        Ok(())
    }
    bk(0, all, 0, &co, &mut out, budget)?;
    let mut sets: Vec<Vec<usize>> = out
        .into_iter()
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect();
    sets.sort();
    Ok(sets)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    /// Stop once an iteration lowers the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
    pub set_budget: u128,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            tol: 1e-9,
            max_iter: 100_000,
            set_budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEntropy {
    pub bits: f64,
    pub sets: Vec<Vec<usize>>,
    /// `conditional[x][w]`: probability of set `w` given vertex `x`.
    pub conditional: Vec<Vec<f64>>,
    /// Objective value after each iteration.
    pub trajectory: Vec<f64>,
    pub converged: bool,
}

impl GraphEntropy {
    pub fn iterations(&self) -> usize {
        self.trajectory.len()
    }
}

fn membership(sets: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut memb = vec![Vec::new(); n];
    for (w, s) in sets.iter().enumerate() {
        for &x in s {
            memb[x].push(w);
        }
    }
    memb
}

fn initial_conditional(memb: &[Vec<usize>], sets: usize) -> Vec<Vec<f64>> {
    memb.iter()
        .map(|m| {
            let mut row = vec![0.0; sets];
            for &w in m {
                row[w] = 1.0 / m.len() as f64;
            }
            row
        })
        .collect()
}

/// Körner graph entropy of `g` under its (renormalized) vertex probabilities.
pub fn graph_entropy(g: &Graph, opts: &EntropyOptions) -> Result<GraphEntropy> {
    let total = g.total_prob();
    if total <= 0.0 {
        return Err(Error::invalid("graph", "vertex probabilities sum to zero"));
    }
    let joint: Vec<f64> = g.prob().iter().map(|p| p / total).collect();
    conditional_core(g, &joint, 1, opts)
}

/// Conditional graph entropy `min I(W; X | Y)` where `g` lives on `X` and
/// `joint` is the pmf of `(X, Y)` with `X` on the first axis.
pub fn conditional_graph_entropy(g: &Graph, joint: &ProbTable, opts: &EntropyOptions) -> Result<GraphEntropy> {
    if joint.dims().len() != 2 || joint.dims()[0] != g.n() {
        return Err(Error::invalid(
            "joint",
            format!("expected a two-axis table with {} rows", g.n()),
        ));
    }
    conditional_core(g, joint.data(), joint.dims()[1], opts)
}

fn conditional_core(g: &Graph, pxy: &[f64], ny: usize, opts: &EntropyOptions) -> Result<GraphEntropy> {
    let n = g.n();
    let sets = maximal_independent_sets(g, opts.set_budget)?;
    let memb = membership(&sets, n);
    let nw = sets.len();
    let px: Vec<f64> = (0..n).map(|x| pxy[x * ny..(x + 1) * ny].iter().sum()).collect();
    let py: Vec<f64> = (0..ny).map(|y| (0..n).map(|x| pxy[x * ny + y]).sum()).collect();
    let active: Vec<usize> = (0..n).filter(|&x| px[x] > 0.0).collect();
    let mut cond = initial_conditional(&memb, nw);
    let mut q = vec![vec![0.0; nw]; ny];
    let mut trajectory: Vec<f64> = Vec::new();
    let mut converged = false;

    for _ in 0..opts.max_iter {
        for (y, qy) in q.iter_mut().enumerate() {
            qy.iter_mut().for_each(|v| *v = 0.0);
            if py[y] <= 0.0 {
                continue;
            }
            for &x in &active {
                let pxgy = pxy[x * ny + y] / py[y];
                if pxgy > 0.0 {
                    for &w in &memb[x] {
                        qy[w] += pxgy * cond[x][w];
                    }
                }
            }
        }
        let mut obj = 0.0;
        for &x in &active {
            for y in 0..ny {
                let p = pxy[x * ny + y];
                if p <= 0.0 {
                    continue;
                }
                for &w in &memb[x] {
                    let c = cond[x][w];
                    if c > 0.0 {
                        obj += p * c * (c / q[y][w]).log2();
                    }
                }
            }
        }
        if let Some(&prev) = trajectory.last() {
            debug_assert!(obj <= prev + 1e-10, "objective increased: {prev} -> {obj}");
            trajectory.push(obj);
            if prev - obj < opts.tol {
                converged = true;
                break;
            }
        } else {
            trajectory.push(obj);
        }
        for &x in &active {
            let mut weights: Vec<(usize, f64)> = Vec::with_capacity(memb[x].len());
            for &w in &memb[x] {
                let mut log_sum = 0.0;
                let mut dead = false;
                for y in 0..ny {
                    let p = pxy[x * ny + y];
                    if p <= 0.0 {
                        continue;
                    }
                    if q[y][w] <= 0.0 {
                        dead = true;
                        break;
                    }
                    log_sum += p / px[x] * q[y][w].ln();
                }
                weights.push((w, if dead { f64::NEG_INFINITY } else { log_sum }));
            }
            let top = weights.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                continue;
            }
            // flush vanishing weights so q never underflows under a live conditional
            let raw: Vec<f64> = weights
                .iter()
                .map(|&(_, l)| (l - top).exp())
                .map(|v| if v < 1e-200 { 0.0 } else { v })
                .collect();
            let norm: f64 = raw.iter().sum();
            for (&(w, _), v) in weights.iter().zip(raw) {
                cond[x][w] = v / norm;
            }
        }
    }
    let bits = trajectory.last().copied().unwrap_or(0.0).max(0.0);
    Ok(GraphEntropy {
        bits,
        sets,
        conditional: cond,
        trajectory,
        converged,
    })
}

/// How a rate value relates to the asymptotic quantity it stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundLabel {
    Exact,
    FiniteN(usize),
}

impl fmt::Display for BoundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundLabel::Exact => f.write_str("exact"),
            BoundLabel::FiniteN(n) => write!(f, "finite-n upper bound, n={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteNValue {
    pub bits: f64,
    pub n: usize,
    pub label: BoundLabel,
    /// Minimizing colorings of the block coordinates (trivial outside the subset).
    pub colorings: Vec<Coloring>,
    pub tuples_examined: u128,
}

/// Minimum over valid colorings of the n-th power graphs of the sources in
/// `subset`, other sources left uncolored, subject to the connectivity
/// condition, of `H(c_S) / n` or `H(c_S | X_rest) / n`.
pub fn finite_n_search(
    model: &JointModel,
    subset: &[usize],
    n: usize,
    conditional: bool,
    budget: u128,
) -> Result<FiniteNValue> {
    let k = model.k();
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.is_empty() || subset.iter().any(|&i| i >= k) {
        return Err(Error::invalid("subset", "must be a nonempty set of source indices"));
    }
    let block = model.block_extend(n, budget)?;
    let graphs: Vec<Graph> = subset
        .iter()
        .map(|&i| power_graph(&characteristic_graph_of(model, i), n, budget))
        .collect::<Result<_>>()?;
    let forced = graphs.iter().all(|g| {
        let pos: Vec<usize> = (0..g.n()).filter(|&v| g.prob()[v] > 0.0).collect();
        g.induced(&pos).edge_count() == pos.len() * pos.len().saturating_sub(1) / 2
    });
    let options: Vec<Vec<Coloring>> = graphs
        .iter()
        .map(|g| enumerate_colorings(g, budget))
        .collect::<Result<_>>()?;
    let mut total: u128 = 1;
    for o in &options {
        total = total.saturating_mul(o.len() as u128);
    }
    if total > budget {
        return Err(Error::budget("coloring tuples", total, budget));
    }

    let rest: Vec<usize> = (0..k).filter(|i| !subset.contains(i)).collect();
    let support: Vec<(Vec<usize>, u64, f64)> = block
        .support()
        .into_iter()
        .map(|c| (block.coords(c), block.values()[c], block.pmf()[c]))
        .collect();
    let dims = block.alphabets();
    let h_rest = if conditional && !rest.is_empty() {
        let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
        for (c, _, p) in &support {
            *m.entry(rest.iter().map(|&i| c[i]).collect()).or_default() += p;
        }
        entropy_of(&m.values().copied().collect::<Vec<_>>())
    } else {
        0.0
    };

    let evaluate = |t: u128| -> Option<f64> {
        let mut idx = t;
        let chosen: Vec<&Coloring> = options
            .iter()
            .map(|o| {
                let i = (idx % o.len() as u128) as usize;
                idx /= o.len() as u128;
                &o[i]
            })
            .collect();
        let mut classes: HashMap<u128, (u64, f64)> = HashMap::with_capacity(support.len());
        for (c, v, p) in &support {
            let mut key: u128 = 0;
            for (s, &i) in subset.iter().enumerate() {
                key = key * dims[i] as u128 + chosen[s].color(c[i]) as u128;
            }
            for &i in &rest {
                key = key * dims[i] as u128 + c[i] as u128;
            }
            match classes.get_mut(&key) {
                Some(e) => {
                    if e.0 != *v {
                        return None;
                    }
                    e.1 += p;
                }
                None => {
                    classes.insert(key, (*v, *p));
                }
            }
        }
        if conditional {
            let masses: Vec<f64> = classes.values().map(|e| e.1).collect();
            Some(entropy_of(&masses) - h_rest)
        } else {
            let mut merged: HashMap<u128, f64> = HashMap::new();
            let tail: u128 = rest.iter().map(|&i| dims[i] as u128).product();
            for (key, (_, p)) in classes {
                *merged.entry(key / tail).or_default() += p;
            }
            Some(entropy_of(&merged.values().copied().collect::<Vec<_>>()))
        }
    };

    // rounding the key makes the reduction order-independent across threads
    let best = (0..total)
        .into_par_iter()
        .filter_map(|t| evaluate(t).map(|h| ((h * 1e12).round() as i64, t, h)))
        .min_by_key(|&(r, t, _)| (r, t))
        .ok_or_else(|| Error::invalid("colorings", "no coloring tuple satisfies the connectivity condition"))?;

    let mut idx = best.1;
    let mut colorings: Vec<Coloring> = (0..k).map(|i| Coloring::trivial(dims[i])).collect();
    for (s, &i) in subset.iter().enumerate() {
        let o = &options[s];
        colorings[i] = o[(idx % o.len() as u128) as usize].clone();
        idx /= o.len() as u128;
    }
    debug_assert!(satisfies_ccc(&joint_coloring_family(&block, &colorings)?)?.holds());
    Ok(FiniteNValue {
        bits: (best.2 / n as f64).max(0.0),
        n,
        label: if forced { BoundLabel::Exact } else { BoundLabel::FiniteN(n) },
        colorings,
        tuples_examined: total,
    })
}

pub fn joint_graph_entropy_finite_n(scenario: &Scenario, subset: &[usize], n: usize, budget: u128) -> Result<FiniteNValue> {
    finite_n_search(&scenario.model(0)?, subset, n, false, budget)
}

pub fn conditional_joint_graph_entropy_finite_n(
    scenario: &Scenario,
    subset: &[usize],
    n: usize,
    budget: u128,
) -> Result<FiniteNValue> {
    finite_n_search(&scenario.model(0)?, subset, n, true, budget)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateInequality {
    pub stage: usize,
    /// Node indices within the stage (0-based).
    pub subset: Vec<usize>,
    pub bound: f64,
    pub label: BoundLabel,
}

impl fmt::Display for RateInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .subset
            .iter()
            .map(|&j| format!("R_{{{},{}}}", self.stage, j + 1))
            .collect();
        write!(f, "{} >= {:.6} [{}]", terms.join("+"), self.bound, self.label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    pub inequalities: Vec<RateInequality>,
}

impl RateRegion {
    pub fn bound_for(&self, subset: &[usize]) -> Option<f64> {
        self.inequalities.iter().find(|q| q.subset == subset).map(|q| q.bound)
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.inequalities.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Nonempty subsets of `0..k`, by size then lexicographically.
pub fn nonempty_subsets(k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << k))
        .map(|m| (0..k).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn region_for_model(model: &JointModel, stage: usize, n: usize, budget: u128) -> Result<RateRegion> {
    let inequalities = nonempty_subsets(model.k())
        .into_iter()
        .map(|s| {
            let v = finite_n_search(model, &s, n, true, budget)?;
            Ok(RateInequality {
                stage,
                subset: s,
                bound: v.bits,
                label: v.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion { inequalities })
}

/// Lower bounds for sources sending directly to the receiver.
pub fn rate_region_one_stage(scenario: &Scenario, n: usize, budget: u128) -> Result<RateRegion> {
    region_for_model(&scenario.model(0)?, 1, n, budget)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageBound {
    pub stage: usize,
    /// Sources behind each node of the stage.
    pub groups: Vec<Vec<usize>>,
    pub region: RateRegion,
}

/// Per-stage bounds on the completed tree: the nodes of each stage act as
/// super-sources carrying all sources below them.
pub fn rate_lower_bound_tree(scenario: &Scenario, n: usize, budget: u128) -> Result<Vec<StageBound>> {
    let tree = complete_tree(scenario)?;
    let base = scenario.model(0)?;
    (1..=tree.depth)
        .map(|stage| {
            let groups = tree.connection_set(stage);
            let model = base.group(&groups)?;
            Ok(StageBound {
                stage,
                region: region_for_model(&model, stage, n, budget)?,
                groups,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRuleGap {
    pub subset: Vec<usize>,
    pub joint: f64,
    pub super_source: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRuleReport {
    /// The two-source sufficient condition, when there are two sources.
    pub sufficient: Option<bool>,
    pub gaps: Vec<ChainRuleGap>,
    pub proper: bool,
    pub witness: Option<Vec<usize>>,
}

/// Whether colors of individual sources cost no more than coloring tuples of
/// sources jointly, checked on every subset with at least two sources.
pub fn is_chain_rule_proper(scenario: &Scenario, n: usize, tol: f64, budget: u128) -> Result<ChainRuleReport> {
    let model = scenario.model(0)?;
    let k = model.k();
    let sufficient = (k == 2).then(|| {
        let (n1, n2) = (model.alphabets()[0], model.alphabets()[1]);
        let f = |a: usize, b: usize| model.values()[a * n2 + b];
        (0..n2).all(|b1| {
            (0..n2).filter(|&b2| b2 != b1).all(|b2| {
                (0..n1).all(|a1| (0..n1).all(|a2| f(a1, b1) != f(a2, b2)))
            })
        })
    });
    let mut gaps = Vec::new();
    for s in nonempty_subsets(k).into_iter().filter(|s| s.len() >= 2) {
        let joint = finite_n_search(&model, &s, n, false, budget)?.bits;
        let mut groups = vec![s.clone()];
        groups.extend((0..k).filter(|i| !s.contains(i)).map(|i| vec![i]));
        let grouped = model.group(&groups)?;
        let g = power_graph(&characteristic_graph_of(&grouped, 0), n, budget)?;
        let colored = best_coloring(&g, &ExactOptions::default());
        gaps.push(ChainRuleGap {
            subset: s,
            joint,
            super_source: colored.entropy / n as f64,
        });
    }
    let witness = gaps
        .iter()
        .filter(|g| g.joint - g.super_source > tol)
        .max_by(|a, b| (a.joint - a.super_source).total_cmp(&(b.joint - b.super_source)))
        .map(|g| g.subset.clone());
    let proper = sufficient.unwrap_or(false) || witness.is_none();
    Ok(ChainRuleReport {
        sufficient,
        gaps,
        proper,
        witness,
    })
}

/// Rounds away floating noise below the internal tolerance.
pub fn clean(v: f64) -> f64 {
    if v.abs() < INTERNAL_TOL {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_sets() {
        let sets = maximal_independent_sets(&Graph::cycle(5), 100).unwrap();
        assert_eq!(sets, vec![vec![0, 2], vec![0, 3], vec![1, 3], vec![1, 4], vec![2, 4]]);
    }

    #[test]
    fn four_cycle_entropy() {
        let r = graph_entropy(&Graph::cycle(4), &EntropyOptions::default()).unwrap();
        assert_eq!(r.sets, vec![vec![0, 2], vec![1, 3]]);
        assert!((r.bits - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pentagon_entropy() {
        let r = graph_entropy(&Graph::cycle(5), &EntropyOptions::default()).unwrap();
        assert!((r.bits - (2.5f64).log2()).abs() < 1e-6);
    }

    #[test]
    fn complete_graph_conditional_is_shannon() {
        // X2 = X1 mod 2, X1 uniform on 4 symbols
        let mut data = vec![0.0; 8];
        for x in 0..4 {
            data[x * 2 + x % 2] = 0.25;
        }
        let t = ProbTable::new(vec![4, 2], data).unwrap();
        let r = conditional_graph_entropy(&Graph::complete(4), &t, &EntropyOptions::default()).unwrap();
        assert!((r.bits - 1.0).abs() < 1e-9);
    }

    #[test]
    fn subsets_order() {
        assert_eq!(nonempty_subsets(2), vec![vec![0], vec![1], vec![0, 1]]);
    }
}
