//! Graph colorings and minimum-entropy coloring searches.
//!
//! Entropies are taken under the graph's vertex probabilities renormalized to
//! sum one, so colorings of restricted graphs are scored on the kept mass.

use std::fmt;

use crate::chargraph::{epsilon_restrict, extract_function_regions, Restriction};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::Scenario;
use crate::prob::{entropy_of, phi, INTERNAL_TOL};

/// Largest graph the exact search accepts by default.
pub const EXACT_VERTEX_CAP: usize = 26;
/// Largest vertex set on which independent sets are maximized exactly.
pub const MIS_EXACT_CAP: usize = 48;

/// A vertex coloring in canonical form: colors are numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<usize>,
    count: usize,
}

impl Coloring {
    pub fn new(raw: Vec<usize>) -> Self {
        let mut map = std::collections::HashMap::new();
        let colors: Vec<usize> = raw
            .iter()
            .map(|c| {
                let next = map.len();
                *map.entry(*c).or_insert(next)
            })
            .collect();
        Coloring {
            count: map.len(),
            colors,
        }
    }

    /// Every vertex its own color.
    pub fn trivial(n: usize) -> Self {
        Coloring {
            colors: (0..n).collect(),
            count: n,
        }
    }

    /// One color for everything.
    pub fn single(n: usize) -> Self {
        Coloring {
            colors: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }
    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }
    pub fn count(&self) -> usize {
        self.count
    }
    pub fn len(&self) -> usize {
        self.colors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn distribution(&self, prob: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.count];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c] += prob[v];
        }
        out
    }

    pub fn entropy(&self, prob: &[f64]) -> f64 {
        entropy_of(&self.distribution(prob))
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes()
            .iter()
            .map(|c| {
                let v: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// First monochromatic edge, if any.
pub fn first_violation(g: &Graph, c: &Coloring) -> Option<(usize, usize)> {
    g.edges().into_iter().find(|&(u, v)| c.color(u) == c.color(v))
}

pub fn is_valid_coloring(g: &Graph, c: &Coloring) -> bool {
    c.len() == g.n() && first_violation(g, c).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NonzeroCase,
    Quantization,
    Greedy,
    GreedyRefined,
    Trivial,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Exact => "exact",
            Method::NonzeroCase => "nonzero-case",
            Method::Quantization => "quantization",
            Method::Greedy => "greedy",
            Method::GreedyRefined => "greedy+refine",
            Method::Trivial => "trivial",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoringReport {
    pub coloring: Coloring,
    pub entropy: f64,
    pub method: Method,
    pub nodes_explored: u64,
    /// The coloring is known to have minimum entropy.
    pub optimal: bool,
}

impl fmt::Display for ColoringReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method: {}", self.method)?;
        writeln!(f, "entropy: {:.6} bits", self.entropy)?;
        writeln!(f, "colors: {}", self.coloring.count())?;
        writeln!(f, "classes: {}", self.coloring)?;
        writeln!(f, "optimal: {}", self.optimal)?;
        write!(f, "nodes explored: {}", self.nodes_explored)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub vertex_cap: usize,
    /// Abort with [`Error::SearchLimit`] after this many search nodes.
    pub node_limit: Option<u64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            vertex_cap: EXACT_VERTEX_CAP,
            node_limit: Some(200_000_000),
        }
    }
}

/// Place zero-probability vertices after the positive ones are colored:
/// each goes to the first class (by smallest member) it can join.
fn place_zero_vertices(g: &Graph, positive_classes: Vec<Vec<usize>>, zeros: &[usize]) -> Coloring {
    let mut classes = positive_classes;
    classes.sort_by_key(|c| c[0]);
    for &z in zeros {
        match classes
            .iter_mut()
            .find(|c| c.iter().all(|&v| !g.has_edge(v, z)))
        {
            Some(c) => c.push(z),
            None => classes.push(vec![z]),
        }
    }
    let mut raw = vec![0; g.n()];
    for (i, c) in classes.iter().enumerate() {
        for &v in c {
            raw[v] = i;
        }
    }
    Coloring::new(raw)
}

struct Exact<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    zeros: Vec<usize>,
    w: Vec<f64>,
    adj: Vec<u64>,
    suffix: Vec<f64>,
    members: Vec<u64>,
    mass: Vec<f64>,
    best: f64,
    best_coloring: Option<Coloring>,
    nodes: u64,
    limit: u64,
}

impl Exact<'_> {
    fn bound(&self, pos: usize) -> f64 {
        let fixed: f64 = self.mass.iter().map(|&m| phi(m)).sum();
        let u = self.suffix[pos];
        if u <= 0.0 {
            return fixed;
        }
        // concave objective: the cheapest completion puts all remaining mass in one place
        let mut extra = phi(u);
        for &m in &self.mass {
            extra = extra.min(phi(m + u) - phi(m));
        }
        fixed + extra
    }

    fn leaf(&mut self) {
        let e: f64 = self.mass.iter().map(|&m| phi(m)).sum();
        if e > self.best + INTERNAL_TOL {
            return;
        }
        let classes: Vec<Vec<usize>> = self
            .members
            .iter()
            .map(|&mask| {
                let mut c: Vec<usize> = (0..self.order.len())
                    .filter(|&p| mask >> p & 1 == 1)
                    .map(|p| self.order[p])
                    .collect();
                c.sort_unstable();
                c
            })
            .collect();
        let coloring = place_zero_vertices(self.g, classes, &self.zeros);
        let better = e < self.best - INTERNAL_TOL
            || self.best_coloring.as_ref().map_or(true, |b| coloring < *b);
        if better {
            self.best = self.best.min(e);
            self.best_coloring = Some(coloring);
        }
    }

    fn dfs(&mut self, pos: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::SearchLimit {
                nodes: self.nodes,
                best: self.best,
            });
        }
        if pos == self.order.len() {
            self.leaf();
            return Ok(());
        }
        if self.bound(pos) > self.best + INTERNAL_TOL {
            return Ok(());
        }
        let bit = 1u64 << pos;
        for c in 0..self.members.len() {
            if self.members[c] & self.adj[pos] == 0 {
                self.members[c] |= bit;
                self.mass[c] += self.w[pos];
                self.dfs(pos + 1)?;
                self.members[c] &= !bit;
                self.mass[c] -= self.w[pos];
            }
        }
        self.members.push(bit);
        self.mass.push(self.w[pos]);
        self.dfs(pos + 1)?;
        self.members.pop();
        self.mass.pop();
        Ok(())
    }
}

/// Globally minimum-entropy coloring by branch and bound over partitions
/// into independent sets. Ties go to the lexicographically smallest canonical
/// coloring.
pub fn min_entropy_coloring_exact(g: &Graph, opts: &ExactOptions) -> Result<ColoringReport> {
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| g.prob()[v] > 0.0).collect();
    let zeros: Vec<usize> = (0..g.n()).filter(|&v| g.prob()[v] <= 0.0).collect();
    let cap = opts.vertex_cap.min(64);
    if order.len() > cap {
        return Err(Error::budget("exact coloring vertices", order.len() as u128, cap as u128));
    }
    order.sort_by(|&a, &b| g.prob()[b].total_cmp(&g.prob()[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&v| g.prob()[v]).sum();
    let w: Vec<f64> = order.iter().map(|&v| g.prob()[v] / total.max(f64::MIN_POSITIVE)).collect();
    let mut suffix = vec![0.0; order.len() + 1];
    for p in (0..order.len()).rev() {
        suffix[p] = suffix[p + 1] + w[p];
    }
    let adj = g.bit_adjacency(&order);

    // a good incumbent makes the bound bite early
    let seed = refine(g, &greedy_mis_coloring(g).coloring);
    let mut search = Exact {
        g,
        order,
        zeros,
        w,
        adj,
        suffix,
        members: Vec::new(),
        mass: Vec::new(),
        best: seed.entropy(g.prob()),
        best_coloring: None,
        nodes: 0,
        limit: opts.node_limit.unwrap_or(u64::MAX),
    };
    search.dfs(0)?;
    let coloring = search.best_coloring.unwrap_or(seed);
    Ok(ColoringReport {
        entropy: coloring.entropy(g.prob()),
        coloring,
        method: Method::Exact,
        nodes_explored: search.nodes,
        optimal: true,
    })
}

/// Optimal coloring when non-adjacency is an equivalence relation
/// (the complement is a disjoint union of cliques): one color per class.
pub fn min_entropy_coloring_nonzero_case(g: &Graph) -> Result<ColoringReport> {
    let n = g.n();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        let mut y = x;
        while comp[y] != r {
            let next = comp[y];
            comp[y] = r;
            y = next;
        }
        r
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                let (a, b) = (find(&mut comp, u), find(&mut comp, v));
                if a != b {
                    comp[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|v| find(&mut comp, v)).collect();
    let coloring = Coloring::new(raw);
    if let Some((u, v)) = first_violation(g, &coloring) {
        return Err(Error::NotApplicable(format!(
            "complement is not a union of cliques: {u} and {v} are adjacent but linked by non-edges"
        )));
    }
    Ok(ColoringReport {
        entropy: coloring.entropy(g.prob()),
        coloring,
        method: Method::NonzeroCase,
        nodes_explored: 0,
        optimal: true,
    })
}

/// One color per block of symbols with identical rows (columns for `i = 1`)
/// of a two-source function. Always a valid coloring.
pub fn quantization_block_coloring(scenario: &Scenario, i: usize) -> Result<Coloring> {
    let regions = extract_function_regions(&oriented(scenario, i)?)?;
    let mut raw = vec![0; scenario.alphabets()[i]];
    for (b, block) in regions.x1_blocks.iter().enumerate() {
        for &x in block {
            raw[x] = b;
        }
    }
    Ok(Coloring::new(raw))
}

/// The scenario with source `i` moved to the front (two sources only).
fn oriented(scenario: &Scenario, i: usize) -> Result<Scenario> {
    if scenario.sources() != 2 || i > 1 {
        return Err(Error::invalid("source", "quantization coloring needs two sources and i in {0, 1}"));
    }
    if i == 0 {
        return Ok(scenario.clone());
    }
    let m = scenario.model(0)?.group(&[vec![1], vec![0]])?;
    let table = m.values().iter().map(|&v| v as u32).collect();
    Scenario::new(
        m.alphabets().to_vec(),
        m.pmf().to_vec(),
        vec![crate::model::FunctionTable { name: "f".into(), table }],
    )
}

/// Optimal block coloring of source `i` for quantization functions whose
/// blocks are pairwise separated. When separation fails the block coloring
/// is still usable; see [`quantization_block_coloring`].
pub fn min_entropy_coloring_quantization(scenario: &Scenario, i: usize) -> Result<ColoringReport> {
    let view = oriented(scenario, i)?;
    let regions = extract_function_regions(&view)?;
    if !regions.is_quantization {
        return Err(Error::NotApplicable("function is not a quantization function".into()));
    }
    for (a, row) in regions.proper.iter().enumerate() {
        if let Some(b) = row.iter().position(|&p| !p) {
            return Err(Error::NotApplicable(format!(
                "function regions with blocks {a} and {b} are not separated"
            )));
        }
    }
    let coloring = quantization_block_coloring(scenario, i)?;
    let g = crate::chargraph::characteristic_graph(scenario, i)?;
    debug_assert!(is_valid_coloring(&g, &coloring));
    Ok(ColoringReport {
        entropy: coloring.entropy(g.prob()),
        coloring,
        method: Method::Quantization,
        nodes_explored: 0,
        optimal: true,
    })
}

/// Maximum-weight independent set within `cand` (ascending ids). Exact up to
/// [`MIS_EXACT_CAP`] vertices, greedy beyond. Ties favour the lexicographically
/// smallest set.
pub fn max_weight_independent_set(g: &Graph, cand: &[usize]) -> Vec<usize> {
    if cand.len() <= MIS_EXACT_CAP {
        let adj = g.bit_adjacency(cand);
        let w: Vec<f64> = cand.iter().map(|&v| g.prob()[v].max(0.0)).collect();
        let mut best = (-1.0f64, 0u64);
        fn go(p: usize, allowed: u64, cur: (f64, u64), w: &[f64], adj: &[u64], best: &mut (f64, u64)) {
            if p == w.len() {
                if cur.0 > best.0 + INTERNAL_TOL {
                    *best = cur;
                }
                return;
            }
            let rest: f64 = (p..w.len()).filter(|&q| allowed >> q & 1 == 1).map(|q| w[q]).sum();
            if cur.0 + rest <= best.0 + INTERNAL_TOL {
                return;
            }
            if allowed >> p & 1 == 1 {
                go(p + 1, allowed & !adj[p], (cur.0 + w[p], cur.1 | 1 << p), w, adj, best);
            }
            go(p + 1, allowed & !(1u64 << p), cur, w, adj, best);
        }
        let all = if cand.len() == 64 { u64::MAX } else { (1u64 << cand.len()) - 1 };
        go(0, all, (0.0, 0), &w, &adj, &mut best);
        (0..cand.len()).filter(|&p| best.1 >> p & 1 == 1).map(|p| cand[p]).collect()
    } else {
        let mut alive: Vec<bool> = vec![false; g.n()];
        for &v in cand {
            alive[v] = true;
        }
        let mut chosen = Vec::new();
        loop {
            let pick = cand
                .iter()
                .filter(|&&v| alive[v])
                .map(|&v| {
                    let deg = g.neighbors(v).iter().filter(|&&u| alive[u]).count();
                    (v, g.prob()[v] / (deg as f64 + 1.0))
                })
                .fold(None::<(usize, f64)>, |acc, (v, s)| match acc {
                    Some((_, bs)) if bs >= s => acc,
                    _ => Some((v, s)),
                });
            let Some((v, _)) = pick else { break };
            chosen.push(v);
            alive[v] = false;
            for &u in g.neighbors(v) {
                alive[u] = false;
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

/// Repeatedly color a maximum-weight independent set of the remaining vertices.
pub fn greedy_mis_coloring(g: &Graph) -> ColoringReport {
    let mut raw = vec![usize::MAX; g.n()];
    let mut remaining: Vec<usize> = (0..g.n()).collect();
    let mut color = 0;
    while !remaining.is_empty() {
        let mut set = max_weight_independent_set(g, &remaining);
        // extend to a maximal set so zero-weight vertices are absorbed
        for &v in &remaining {
            if !set.contains(&v) && set.iter().all(|&u| !g.has_edge(u, v)) {
                set.push(v);
            }
        }
        for &v in &set {
            raw[v] = color;
        }
        color += 1;
        remaining.retain(|v| raw[*v] == usize::MAX);
    }
    let coloring = Coloring::new(raw);
    ColoringReport {
        entropy: coloring.entropy(g.prob()),
        coloring,
        method: Method::Greedy,
        nodes_explored: 0,
        optimal: false,
    }
}

/// Local search: move single vertices between classes while entropy drops.
pub fn refine(g: &Graph, start: &Coloring) -> Coloring {
    let total = g.total_prob().max(f64::MIN_POSITIVE);
    let w: Vec<f64> = g.prob().iter().map(|p| p / total).collect();
    let mut colors = start.colors().to_vec();
    let mut mass = start.distribution(&w);
    loop {
        let mut improved = false;
        for v in 0..g.n() {
            if w[v] <= 0.0 {
                continue;
            }
            let from = colors[v];
            let mut blocked = vec![false; mass.len()];
            for &u in g.neighbors(v) {
                blocked[colors[u]] = true;
            }
            let mut best: Option<(usize, f64)> = None;
            for to in 0..mass.len() {
                if to == from || blocked[to] {
                    continue;
                }
                let delta = phi(mass[from] - w[v]) + phi(mass[to] + w[v]) - phi(mass[from]) - phi(mass[to]);
                if delta < -INTERNAL_TOL && best.map_or(true, |(_, d)| delta < d) {
                    best = Some((to, delta));
                }
            }
            if let Some((to, _)) = best {
                mass[from] -= w[v];
                mass[to] += w[v];
                colors[v] = to;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Coloring::new(colors)
}

/// Exact search when the graph is small enough and the search finishes,
/// otherwise greedy with local refinement.
pub fn best_coloring(g: &Graph, opts: &ExactOptions) -> ColoringReport {
    match min_entropy_coloring_exact(g, opts) {
        Ok(r) => r,
        Err(_) => {
            let greedy = greedy_mis_coloring(g);
            let coloring = refine(g, &greedy.coloring);
            ColoringReport {
                entropy: coloring.entropy(g.prob()),
                coloring,
                method: Method::GreedyRefined,
                nodes_explored: 0,
                optimal: false,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChromaticEntropy {
    pub restriction: Restriction,
    /// Coloring of the restricted graph.
    pub report: ColoringReport,
    pub entropy: f64,
}

/// Minimum entropy over colorings of the eps-restricted graph.
pub fn chromatic_entropy(g: &Graph, eps: f64, opts: &ExactOptions) -> Result<ChromaticEntropy> {
    let restriction = epsilon_restrict(g, eps)?;
    let report = min_entropy_coloring_exact(&restriction.graph, opts)?;
    Ok(ChromaticEntropy {
        entropy: report.entropy,
        restriction,
        report,
    })
}

/// All valid colorings that differ on positive-probability vertices.
/// Zero-probability vertices get colors of their own.
pub fn enumerate_colorings(g: &Graph, budget: u128) -> Result<Vec<Coloring>> {
    let pos: Vec<usize> = (0..g.n()).filter(|&v| g.prob()[v] > 0.0).collect();
    let zeros: Vec<usize> = (0..g.n()).filter(|&v| g.prob()[v] <= 0.0).collect();
    let mut out = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    fn go(
        i: usize,
        pos: &[usize],
        zeros: &[usize],
        g: &Graph,
        classes: &mut Vec<Vec<usize>>,
        out: &mut Vec<Coloring>,
        budget: u128,
    ) -> Result<()> {
        if i == pos.len() {
            if out.len() as u128 >= budget {
                return Err(Error::budget("enumerated colorings", budget + 1, budget));
            }
            let mut raw = vec![0; g.n()];
            for (c, members) in classes.iter().enumerate() {
                for &v in members {
                    raw[v] = c;
                }
            }
            for (k, &z) in zeros.iter().enumerate() {
                raw[z] = classes.len() + k;
            }
            out.push(Coloring::new(raw));
            return Ok(());
        }
        let v = pos[i];
        for c in 0..classes.len() {
            if classes[c].iter().all(|&u| !g.has_edge(u, v)) {
                classes[c].push(v);
                go(i + 1, pos, zeros, g, classes, out, budget)?;
                classes[c].pop();
            }
        }
        classes.push(vec![v]);
        go(i + 1, pos, zeros, g, classes, out, budget)?;
        classes.pop();
        Ok(())
    }
    go(0, &pos, &zeros, g, &mut classes, &mut out, budget)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_exact() {
        let r = min_entropy_coloring_exact(&Graph::cycle(5), &ExactOptions::default()).unwrap();
        assert!((r.entropy - 1.521928).abs() < 1e-6);
        let mut sizes: Vec<usize> = r.coloring.classes().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert!(r.optimal);
    }

    #[test]
    fn four_cycle_two_colors() {
        let r = min_entropy_coloring_exact(&Graph::cycle(4), &ExactOptions::default()).unwrap();
        assert!((r.entropy - 1.0).abs() < 1e-12);
        assert_eq!(r.coloring.colors(), &[0, 1, 0, 1]);
    }

    #[test]
    fn path_is_not_nonzero_case() {
        // three edges: 0 and 2 are non-adjacent, 0 and 3 too, but 2 ~ 3
        let path = Graph::simple(vec![0.25; 4], [(0, 1), (1, 2), (2, 3)]);
        assert!(matches!(min_entropy_coloring_nonzero_case(&path), Err(Error::NotApplicable(_))));
        // with two edges the complement is an edge plus a point, so it applies
        let short = Graph::simple(vec![1.0 / 3.0; 3], [(0, 1), (1, 2)]);
        assert_eq!(min_entropy_coloring_nonzero_case(&short).unwrap().coloring.colors(), &[0, 1, 0]);
        let k22 = Graph::simple(vec![0.25; 4], [(0, 2), (0, 3), (1, 2), (1, 3)]);
        let r = min_entropy_coloring_nonzero_case(&k22).unwrap();
        assert_eq!(r.coloring.colors(), &[0, 0, 1, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::simple(vec![1.0 / 30.0; 30], []);
        let opts = ExactOptions::default();
        assert!(matches!(min_entropy_coloring_exact(&g, &opts), Err(Error::Budget { .. })));
    }

    #[test]
    fn zero_probability_vertices_are_placed() {
        let g = Graph::simple(vec![0.5, 0.5, 0.0], [(0, 1), (0, 2), (1, 2)]);
        let r = min_entropy_coloring_exact(&g, &ExactOptions::default()).unwrap();
        assert!(is_valid_coloring(&g, &r.coloring));
        assert_eq!(r.coloring.count(), 3);
        assert!((r.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pentagon_restricted() {
        let c = chromatic_entropy(&Graph::cycle(5), 0.2, &ExactOptions::default()).unwrap();
        assert_eq!(c.restriction.kept, vec![1, 2, 3, 4]);
        assert!((c.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_on_pentagon() {
        let r = greedy_mis_coloring(&Graph::cycle(5));
        assert_eq!(r.coloring.colors(), &[0, 1, 0, 1, 2]);
    }

    #[test]
    fn enumeration_counts() {
        // partitions of C4 into independent sets: {02}{13}, {02}{1}{3}, {0}{2}{13}, all singletons
        assert_eq!(enumerate_colorings(&Graph::cycle(4), 100).unwrap().len(), 4);
        assert!(enumerate_colorings(&Graph::simple(vec![0.1; 10], []), 10).is_err());
    }
}
