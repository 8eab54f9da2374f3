//! Tree completion: every source ends up alone on a leaf, and every leaf sits
//! at the same depth, so the network splits into stages.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Scenario, TreeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Receiver,
    Original,
    /// Leaf split off a node that observes a source but also relays or observes others.
    FakeLeaf,
    /// Extra hop that pushes a shallow leaf down to the common depth.
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub name: String,
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    /// Source observed here (leaves only).
    pub source: Option<usize>,
    /// Sources in the subtree, ascending.
    pub below: Vec<usize>,
    /// Original node whose outgoing link this node's outgoing edge realizes.
    /// `None` for edges internal to a node (fake leaves and their hops).
    pub link: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletedTree {
    pub nodes: Vec<TreeNode>,
    pub receiver: usize,
    /// Common leaf depth; stages are numbered `1..=depth` from the receiver.
    pub depth: usize,
}

impl CompletedTree {
    /// Nodes at distance `stage` from the receiver, ordered by smallest source below.
    pub fn stage_nodes(&self, stage: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].depth == stage && i != self.receiver)
            .collect();
        v.sort_by_key(|&i| self.nodes[i].below[0]);
        v
    }

    /// Sources carried by each node of a stage.
    pub fn connection_set(&self, stage: usize) -> Vec<Vec<usize>> {
        self.stage_nodes(stage)
            .into_iter()
            .map(|i| self.nodes[i].below.clone())
            .collect()
    }

    pub fn auxiliary_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Auxiliary).count()
    }

    /// Completed-tree nodes whose outgoing edges realize each original link.
    pub fn link_map(&self) -> BTreeMap<String, Vec<usize>> {
        let mut m: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(l) = &n.link {
                m.entry(l.clone()).or_default().push(i);
            }
        }
        m
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        for stage in 1..=self.depth {
            let groups: Vec<String> = self
                .stage_nodes(stage)
                .iter()
                .map(|&i| {
                    let s: Vec<String> = self.nodes[i].below.iter().map(|x| format!("X{}", x + 1)).collect();
                    format!("{}=({})", self.nodes[i].name, s.join(","))
                })
                .collect();
            out.push_str(&format!("stage {stage}: {}\n", groups.join(" ")));
        }
        out
    }
}

pub fn complete_tree(scenario: &Scenario) -> Result<CompletedTree> {
    let star;
    let spec = match scenario.tree() {
        Some(t) => t,
        None => {
            star = TreeSpec::star(scenario.sources());
            &star
        }
    };
    complete(spec, scenario.sources())
}

pub fn complete(spec: &TreeSpec, sources: usize) -> Result<CompletedTree> {
    spec.validate(sources)?;
    let index: BTreeMap<&str, usize> = spec
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.name.as_str(), i))
        .collect();
    let mut nodes: Vec<TreeNode> = spec
        .nodes
        .iter()
        .map(|n| TreeNode {
            name: n.name.clone(),
            kind: if n.parent.is_none() { NodeKind::Receiver } else { NodeKind::Original },
            parent: n.parent.as_ref().map(|p| index[p.as_str()]),
            children: Vec::new(),
            depth: 0,
            source: None,
            below: Vec::new(),
            link: n.parent.as_ref().map(|_| n.name.clone()),
        })
        .collect();
    let receiver = nodes.iter().position(|n| n.kind == NodeKind::Receiver).expect("validated");
    for i in 0..nodes.len() {
        if let Some(p) = nodes[i].parent {
            nodes[p].children.push(i);
        }
    }

    // sources at internal nodes, and extra sources at leaves, move to fake leaves
    for (i, n) in spec.nodes.iter().enumerate() {
        if n.sources.len() == 1 && nodes[i].children.is_empty() {
            nodes[i].source = Some(n.sources[0]);
            continue;
        }
        for &s in &n.sources {
            let id = nodes.len();
            nodes.push(TreeNode {
                name: format!("{}.x{}", n.name, s + 1),
                kind: NodeKind::FakeLeaf,
                parent: Some(i),
                children: Vec::new(),
                depth: 0,
                source: Some(s),
                below: Vec::new(),
                link: None,
            });
            nodes[i].children.push(id);
        }
    }

    fn fill_below(nodes: &mut Vec<TreeNode>, v: usize) -> Vec<usize> {
        let mut below: Vec<usize> = nodes[v].source.into_iter().collect();
        for c in nodes[v].children.clone() {
            below.extend(fill_below(nodes, c));
        }
        below.sort_unstable();
        nodes[v].below = below.clone();
        below
    }
    fill_below(&mut nodes, receiver);

    // branches that carry no source send nothing
    let dead: Vec<bool> = nodes.iter().enumerate().map(|(i, n)| i != receiver && n.below.is_empty()).collect();
    if dead.iter().any(|&d| d) {
        let keep: Vec<usize> = (0..nodes.len()).filter(|&i| !dead[i]).collect();
        let mut remap = vec![usize::MAX; nodes.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        nodes = keep
            .iter()
            .map(|&old| {
                let mut n = nodes[old].clone();
                n.parent = n.parent.map(|p| remap[p]);
                n.children = n.children.iter().filter(|&&c| !dead[c]).map(|&c| remap[c]).collect();
                n
            })
            .collect();
    }
    let receiver = nodes.iter().position(|n| n.kind == NodeKind::Receiver).expect("kept");
    if nodes[receiver].children.is_empty() {
        return Err(Error::invalid("tree", "no source reaches the receiver"));
    }

    fn fill_depth(nodes: &mut Vec<TreeNode>, v: usize, d: usize) {
        nodes[v].depth = d;
        for c in nodes[v].children.clone() {
            fill_depth(nodes, c, d + 1);
        }
    }
    fill_depth(&mut nodes, receiver, 0);
    let depth = nodes.iter().filter(|n| n.source.is_some()).map(|n| n.depth).max().unwrap_or(1);

    let leaves: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].source.is_some()).collect();
    for leaf in leaves {
        let mut cur = leaf;
        let source = nodes[leaf].source;
        let link = nodes[leaf].link.clone();
        let hops = depth - nodes[leaf].depth;
        if hops == 0 {
            continue;
        }
        nodes[leaf].source = None;
        for h in 1..=hops {
            let id = nodes.len();
            nodes.push(TreeNode {
                name: format!("{}+{}", nodes[leaf].name, h),
                kind: NodeKind::Auxiliary,
                parent: Some(cur),
                children: Vec::new(),
                depth: nodes[cur].depth + 1,
                source: if h == hops { source } else { None },
                below: nodes[leaf].below.clone(),
                link: link.clone(),
            });
            nodes[cur].children.push(id);
            cur = id;
        }
    }
    Ok(CompletedTree { nodes, receiver, depth })
}
