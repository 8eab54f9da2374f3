//! Scenario files and the joint source model derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::prob::{check_distribution, checked_product, decode, encode, ProbTable, INTERNAL_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionTable {
    pub name: String,
    /// One output symbol per cell of the product alphabet, row-major.
    pub table: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeNodeSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    /// Source indices (0-based) observed at this node.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<usize>,
}

/// A rooted tree given by parent links. The unique parentless node is the receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSpec {
    pub nodes: Vec<TreeNodeSpec>,
}

impl TreeSpec {
    pub fn validate(&self, sources: usize) -> Result<()> {
        let mut names = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if names.insert(n.name.as_str(), i).is_some() {
                return Err(Error::invalid("tree", format!("duplicate node '{}'", n.name)));
            }
        }
        let roots: Vec<&TreeNodeSpec> = self.nodes.iter().filter(|n| n.parent.is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::invalid(
                "tree",
                format!("expected one receiver (parentless node), found {}", roots.len()),
            ));
        }
        if !roots[0].sources.is_empty() {
            return Err(Error::invalid("tree", "the receiver cannot observe sources"));
        }
        for n in &self.nodes {
            if let Some(p) = &n.parent {
                if !names.contains_key(p.as_str()) {
                    return Err(Error::invalid(
                        "tree",
                        format!("node '{}' has unknown parent '{}'", n.name, p),
                    ));
                }
            }
        }
        // every node must reach the root without revisiting
        for (start, _) in self.nodes.iter().enumerate() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = &self.nodes[cur].parent {
                cur = names[p.as_str()];
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(Error::invalid("tree", "parent links contain a cycle"));
                }
            }
        }
        let mut seen = vec![0usize; sources];
        for n in &self.nodes {
            for &s in &n.sources {
                if s >= sources {
                    return Err(Error::invalid(
                        "tree",
                        format!("node '{}' observes unknown source {s}", n.name),
                    ));
                }
                seen[s] += 1;
            }
        }
        if let Some(s) = seen.iter().position(|&c| c != 1) {
            return Err(Error::invalid(
                "tree",
                format!("source {s} is observed at {} nodes, expected exactly one", seen[s]),
            ));
        }
        Ok(())
    }

    /// Every source attached directly to the receiver.
    pub fn star(sources: usize) -> TreeSpec {
        let mut nodes = vec![TreeNodeSpec {
            name: "receiver".into(),
            parent: None,
            sources: vec![],
        }];
        for s in 0..sources {
            nodes.push(TreeNodeSpec {
                name: format!("x{}", s + 1),
                parent: Some("receiver".into()),
                sources: vec![s],
            });
        }
        TreeSpec { nodes }
    }
}

/// Sources, their joint pmf, the functions of interest and optional network data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
    functions: Vec<FunctionTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree: Option<TreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distortion: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<String>>>,
}

impl Scenario {
    pub fn new(alphabets: Vec<usize>, pmf: Vec<f64>, functions: Vec<FunctionTable>) -> Result<Self> {
        let s = Scenario {
            name: None,
            alphabets,
            pmf,
            functions,
            tree: None,
            distortion: None,
            labels: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Convenience constructor for a single function given as a closure over symbol tuples.
    pub fn from_fn(
        alphabets: Vec<usize>,
        pmf: Vec<f64>,
        f: impl Fn(&[usize]) -> u32,
    ) -> Result<Self> {
        let table = (0..alphabets.iter().product::<usize>())
            .map(|i| f(&decode(&alphabets, i)))
            .collect();
        Scenario::new(
            alphabets,
            pmf,
            vec![FunctionTable {
                name: "f".into(),
                table,
            }],
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_tree(mut self, tree: TreeSpec) -> Result<Self> {
        tree.validate(self.alphabets.len())?;
        self.tree = Some(tree);
        Ok(self)
    }

    pub fn with_distortion(mut self, d: Vec<Vec<f64>>) -> Result<Self> {
        self.distortion = Some(d);
        self.validate()?;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        self.labels = Some(labels);
        self.validate()?;
        Ok(self)
    }

    pub fn with_functions(mut self, functions: Vec<FunctionTable>) -> Result<Self> {
        self.functions = functions;
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }
    pub fn sources(&self) -> usize {
        self.alphabets.len()
    }
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
    pub fn functions(&self) -> &[FunctionTable] {
        &self.functions
    }
    pub fn tree(&self) -> Option<&TreeSpec> {
        self.tree.as_ref()
    }
    pub fn distortion(&self) -> Option<&Vec<Vec<f64>>> {
        self.distortion.as_ref()
    }
    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    /// Number of output symbols any function can produce.
    pub fn output_alphabet(&self) -> usize {
        let max_f = self
            .functions
            .iter()
            .flat_map(|f| f.table.iter().copied())
            .max()
            .map_or(0, |m| m as usize + 1);
        self.distortion.as_ref().map_or(max_f, |d| d.len().max(max_f))
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabets.is_empty() {
            return Err(Error::invalid("alphabets", "at least one source is required"));
        }
        if let Some(i) = self.alphabets.iter().position(|&a| a == 0) {
            return Err(Error::invalid("alphabets", format!("source {i} has an empty alphabet")));
        }
        let cells = checked_product("product alphabet", &self.alphabets, u32::MAX as u128)?;
        if self.pmf.len() != cells {
            return Err(Error::invalid(
                "pmf",
                format!("{} entries for a product alphabet of {cells} cells", self.pmf.len()),
            ));
        }
        check_distribution("pmf", &self.pmf)?;
        if self.functions.is_empty() {
            return Err(Error::invalid("functions", "at least one function table is required"));
        }
        let mut names = BTreeSet::new();
        for f in &self.functions {
            if f.table.len() != cells {
                return Err(Error::invalid(
                    format!("functions.{}", f.name),
                    format!("{} entries for {cells} cells", f.table.len()),
                ));
            }
            if !names.insert(f.name.as_str()) {
                return Err(Error::invalid("functions", format!("duplicate name '{}'", f.name)));
            }
        }
        if let Some(d) = &self.distortion {
            let z = d.len();
            let max_f = self
                .functions
                .iter()
                .flat_map(|f| f.table.iter())
                .max()
                .copied()
                .unwrap_or(0) as usize;
            if z <= max_f {
                return Err(Error::invalid(
                    "distortion",
                    format!("table covers {z} outputs but functions use symbol {max_f}"),
                ));
            }
            for (a, row) in d.iter().enumerate() {
                if row.len() != z {
                    return Err(Error::invalid("distortion", "table must be square"));
                }
                for (b, &v) in row.iter().enumerate() {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::invalid("distortion", format!("d({a},{b}) = {v}")));
                    }
                    if (a == b) != (v == 0.0) {
                        return Err(Error::invalid(
                            "distortion",
                            format!("d({a},{b}) = {v}; zero distortion must mean equal outputs"),
                        ));
                    }
                }
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.alphabets.len()
                || labels.iter().zip(&self.alphabets).any(|(l, &a)| l.len() != a)
            {
                return Err(Error::invalid("labels", "label lists must match the alphabets"));
            }
        }
        if let Some(t) = &self.tree {
            t.validate(self.alphabets.len())?;
        }
        Ok(())
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    /// Joint model for function `fi` at block length one.
    pub fn model(&self, fi: usize) -> Result<JointModel> {
        let f = self
            .functions
            .get(fi)
            .ok_or_else(|| Error::invalid("function", format!("no function with index {fi}")))?;
        Ok(JointModel {
            alphabets: self.alphabets.clone(),
            pmf: self.pmf.clone(),
            values: f.table.iter().map(|&v| v as u64).collect(),
            value_count: self.output_alphabet().max(1) as u64,
        })
    }

    pub fn table(&self) -> ProbTable {
        ProbTable::new_unchecked(self.alphabets.clone(), self.pmf.clone())
    }

    pub fn symbol_label(&self, source: usize, symbol: usize) -> String {
        match &self.labels {
            Some(l) => l[source][symbol].clone(),
            None => symbol.to_string(),
        }
    }

    /// Short stable digest of the canonical serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, scenario.to_json() + "\n")?;
    Ok(())
}

/// Sources with a joint pmf and one total function on the product alphabet.
///
/// The same type describes single-letter scenarios, block extensions
/// (each coordinate is a source sequence) and regroupings of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
    values: Vec<u64>,
    /// Upper bound on output symbols; block values are encoded in this radix.
    value_count: u64,
}

impl JointModel {
    pub fn new(alphabets: Vec<usize>, pmf: Vec<f64>, values: Vec<u64>) -> Result<Self> {
        let cells: usize = alphabets.iter().product();
        if pmf.len() != cells || values.len() != cells || alphabets.contains(&0) {
            return Err(Error::invalid("model", "pmf and values must cover the product alphabet"));
        }
        check_distribution("pmf", &pmf)?;
        let value_count = values.iter().max().map_or(1, |m| m + 1);
        Ok(JointModel {
            alphabets,
            pmf,
            values,
            value_count,
        })
    }

    pub fn k(&self) -> usize {
        self.alphabets.len()
    }
    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
    pub fn values(&self) -> &[u64] {
        &self.values
    }
    pub fn cells(&self) -> usize {
        self.pmf.len()
    }
    pub fn coords(&self, cell: usize) -> Vec<usize> {
        decode(&self.alphabets, cell)
    }
    pub fn cell(&self, coords: &[usize]) -> usize {
        encode(&self.alphabets, coords)
    }

    /// Cells with positive probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.cells()).filter(|&c| self.pmf[c] > 0.0).collect()
    }

    pub fn marginal(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.alphabets[i]];
        for (cell, &p) in self.pmf.iter().enumerate() {
            if p > 0.0 {
                out[self.coords(cell)[i]] += p;
            }
        }
        out
    }

    pub fn table(&self) -> ProbTable {
        ProbTable::new_unchecked(self.alphabets.clone(), self.pmf.clone())
    }

    pub fn with_values(&self, values: Vec<u64>) -> Result<JointModel> {
        if values.len() != self.cells() {
            return Err(Error::invalid("values", "table does not cover the product alphabet"));
        }
        let value_count = values.iter().max().map_or(1, |m| m + 1).max(self.value_count);
        Ok(JointModel {
            alphabets: self.alphabets.clone(),
            pmf: self.pmf.clone(),
            values,
            value_count,
        })
    }

    /// Identity function: the value is the cell index itself.
    pub fn identity(&self) -> JointModel {
        JointModel {
            alphabets: self.alphabets.clone(),
            pmf: self.pmf.clone(),
            values: (0..self.cells() as u64).collect(),
            value_count: self.cells() as u64,
        }
    }

    /// True when the pmf factors into its marginals.
    pub fn is_independent(&self) -> bool {
        let marginals: Vec<Vec<f64>> = (0..self.k()).map(|i| self.marginal(i)).collect();
        (0..self.cells()).all(|cell| {
            let c = self.coords(cell);
            let prod: f64 = c.iter().enumerate().map(|(i, &x)| marginals[i][x]).product();
            (prod - self.pmf[cell]).abs() <= INTERNAL_TOL
        })
    }

    /// Merge coordinates: new coordinate `j` is the tuple of `groups[j]`
    /// (mixed radix, in the listed order). Groups must partition the coordinates.
    pub fn group(&self, groups: &[Vec<usize>]) -> Result<JointModel> {
        let mut seen = vec![false; self.k()];
        for g in groups {
            if g.is_empty() {
                return Err(Error::invalid("groups", "empty group"));
            }
            for &i in g {
                if i >= self.k() || seen[i] {
                    return Err(Error::invalid("groups", "groups must partition the coordinates"));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("groups", "groups must partition the coordinates"));
        }
        let dims: Vec<usize> = groups
            .iter()
            .map(|g| g.iter().map(|&i| self.alphabets[i]).product())
            .collect();
        let mut pmf = vec![0.0; self.cells()];
        let mut values = vec![0; self.cells()];
        for cell in 0..self.cells() {
            let c = self.coords(cell);
            let new_cell = encode(&dims, &group_coords(&c, groups, &self.alphabets));
            pmf[new_cell] = self.pmf[cell];
            values[new_cell] = self.values[cell];
        }
        Ok(JointModel {
            alphabets: dims,
            pmf,
            values,
            value_count: self.value_count,
        })
    }

    /// The n-fold i.i.d. extension. Coordinate `i` becomes the sequence of its
    /// symbols (first symbol most significant); the value is the vector of outputs.
    pub fn block_extend(&self, n: usize, budget: u128) -> Result<JointModel> {
        if n == 0 {
            return Err(Error::invalid("n", "block length must be at least 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let base = self.cells();
        let total = checked_product("block cells", &vec![base; n], budget)?;
        let vc = self.value_count as u128;
        if vc.checked_pow(n as u32).map_or(true, |v| v > u64::MAX as u128) {
            return Err(Error::budget("block output symbols", u128::MAX, u64::MAX as u128));
        }
        let dims: Vec<usize> = self.alphabets.iter().map(|&a| a.pow(n as u32)).collect();
        let base_coords: Vec<Vec<usize>> = (0..base).map(|c| self.coords(c)).collect();
        let mut pmf = vec![0.0; total];
        let mut values = vec![0u64; total];
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let mut p = 1.0;
            let mut v: u64 = 0;
            let mut seqs = vec![0usize; self.k()];
            for &d in &digits {
                p *= self.pmf[d];
                v = v * self.value_count + self.values[d];
                for (i, s) in seqs.iter_mut().enumerate() {
                    *s = *s * self.alphabets[i] + base_coords[d][i];
                }
            }
            let cell = encode(&dims, &seqs);
            pmf[cell] = p;
            values[cell] = v;
            for t in (0..n).rev() {
                digits[t] += 1;
                if digits[t] < base {
                    break;
                }
                digits[t] = 0;
            }
        }
        Ok(JointModel {
            alphabets: dims,
            pmf,
            values,
            value_count: self.value_count.pow(n as u32),
        })
    }
}

/// Per-group mixed-radix symbols of a coordinate tuple.
pub fn group_coords(coords: &[usize], groups: &[Vec<usize>], alphabets: &[usize]) -> Vec<usize> {
    groups
        .iter()
        .map(|g| g.iter().fold(0, |acc, &i| acc * alphabets[i] + coords[i]))
        .collect()
}

/// The n-fold extension of a scenario's joint pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPmf {
    pub n: usize,
    pub base_alphabets: Vec<usize>,
    pub table: ProbTable,
}

impl BlockPmf {
    /// Symbols of the sequence with index `idx` for source `i`.
    pub fn sequence(&self, i: usize, idx: usize) -> Vec<usize> {
        decode(&vec![self.base_alphabets[i]; self.n], idx)
    }
}

pub fn block_extend(scenario: &Scenario, n: usize, budget: u128) -> Result<BlockPmf> {
    let m = scenario.model(0)?.block_extend(n, budget)?;
    Ok(BlockPmf {
        n,
        base_alphabets: scenario.alphabets().to_vec(),
        table: ProbTable::new_unchecked(m.alphabets, m.pmf),
    })
}
