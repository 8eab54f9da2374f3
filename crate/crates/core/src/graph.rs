//! Undirected simple graphs with vertex probabilities.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    /// Symbol tuple carried by each vertex (a sequence for power graphs).
    labels: Vec<Vec<usize>>,
    prob: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(
        labels: Vec<Vec<usize>>,
        prob: Vec<f64>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        assert_eq!(labels.len(), prob.len(), "one probability per vertex");
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Graph { labels, prob, adj }
    }

    /// Vertices `0..n` labelled by their index.
    pub fn simple(prob: Vec<f64>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let labels = (0..prob.len()).map(|i| vec![i]).collect();
        Graph::new(labels, prob, edges)
    }

    pub fn cycle(n: usize) -> Self {
        Graph::simple(vec![1.0 / n as f64; n], (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::simple(vec![1.0 / n as f64; n], edges)
    }

    pub fn n(&self) -> usize {
        self.prob.len()
    }
    pub fn prob(&self) -> &[f64] {
        &self.prob
    }
    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, a) in self.adj.iter().enumerate() {
            out.extend(a.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn total_prob(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn with_prob(&self, prob: Vec<f64>) -> Graph {
        assert_eq!(prob.len(), self.n());
        Graph {
            labels: self.labels.clone(),
            prob,
            adj: self.adj.clone(),
        }
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(self.labels.clone(), self.prob.clone(), edges)
    }

    /// Subgraph induced by `keep` (ascending vertex ids), in that order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX && pos[w] > i {
                    edges.push((i, pos[w]));
                }
            }
        }
        Graph::new(
            keep.iter().map(|&v| self.labels[v].clone()).collect(),
            keep.iter().map(|&v| self.prob[v]).collect(),
            edges,
        )
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// Adjacency of the vertices in `local` as bit masks over their positions.
    pub(crate) fn bit_adjacency(&self, local: &[usize]) -> Vec<u64> {
        assert!(local.len() <= 64);
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in local.iter().enumerate() {
            pos[v] = i;
        }
        local
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| pos[w] != usize::MAX)
                    .fold(0u64, |m, &w| m | (1u64 << pos[w]))
            })
            .collect()
    }

    /// Adjacency list text: one line per vertex, `id [label] probability : neighbors`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vertices {} edges {}", self.n(), self.edge_count());
        for v in 0..self.n() {
            let label: Vec<String> = self.labels[v].iter().map(|s| s.to_string()).collect();
            let nbrs: Vec<String> = self.adj[v].iter().map(|w| w.to_string()).collect();
            let _ = writeln!(
                out,
                "{} [{}] {:.12} : {}",
                v,
                label.join(","),
                self.prob[v],
                nbrs.join(" ")
            );
        }
        out
    }

    pub fn parse_export(text: &str) -> Result<Graph> {
        let bad = |line: &str| Error::Parse(format!("malformed graph line '{line}'"));
        let mut labels = Vec::new();
        let mut prob = Vec::new();
        let mut edges = Vec::new();
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            let (head, tail) = line.split_once(':').ok_or_else(|| bad(line))?;
            let open = head.find('[').ok_or_else(|| bad(line))?;
            let close = head.find(']').ok_or_else(|| bad(line))?;
            let id: usize = head[..open].trim().parse().map_err(|_| bad(line))?;
            if id != labels.len() {
                return Err(bad(line));
            }
            let label = head[open + 1..close]
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad(line)))
                .collect::<Result<Vec<_>>>()?;
            let p: f64 = head[close + 1..].trim().parse().map_err(|_| bad(line))?;
            for w in tail.split_whitespace() {
                edges.push((id, w.parse::<usize>().map_err(|_| bad(line))?));
            }
            labels.push(label);
            prob.push(p);
        }
        if edges.iter().any(|&(_, w)| w >= labels.len()) {
            return Err(Error::Parse("neighbor id out of range".into()));
        }
        Ok(Graph::new(labels, prob, edges))
    }
}
