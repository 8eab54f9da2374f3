//! Running block inputs through a plan and accounting link rates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_entropy::{finite_n_search, BoundLabel};
use crate::model::{JointModel, Scenario};
use crate::netsim::huffman::average_length;
use crate::netsim::plan::Plan;
use crate::prob::entropy_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SimMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimMode::Exhaustive => f.write_str("exhaustive"),
            SimMode::Sampled { trials, .. } => write!(f, "sampled ({trials} trials)"),
        }
    }
}

/// Inputs to run with their weights: probabilities when exhaustive,
/// sample frequencies otherwise. Also returns the trial count.
pub(crate) fn workload(model: &JointModel, mode: SimMode) -> Result<(Vec<(usize, f64, u64)>, u64)> {
    match mode {
        SimMode::Exhaustive => {
            let cells: Vec<(usize, f64, u64)> = model.support().into_iter().map(|c| (c, model.pmf()[c], 1)).collect();
            let n = cells.len() as u64;
            Ok((cells, n))
        }
        SimMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::invalid("trials", "must be positive"));
            }
            let support = model.support();
            let weights: Vec<f64> = support.iter().map(|&c| model.pmf()[c]).collect();
            let dist = WeightedIndex::new(&weights).map_err(|e| Error::invalid("pmf", e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for _ in 0..trials {
                *counts.entry(support[dist.sample(&mut rng)]).or_default() += 1;
            }
            let cells = counts
                .into_iter()
                .map(|(c, k)| (c, k as f64 / trials as f64, k))
                .collect();
            Ok((cells, trials))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkReport {
    pub name: String,
    pub stage: usize,
    /// Entropy of the color stream, bits per source symbol.
    pub rate: f64,
    /// Average Huffman codeword length of the color stream, bits per source symbol.
    pub empirical: f64,
    pub bound: Option<f64>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackStats {
    pub p_a: f64,
    pub empirical_p_a: f64,
    pub prime_blocks: u64,
    pub min_blocks: u64,
    pub rate_without: f64,
    pub rate_with: f64,
    pub charged_rate: f64,
    pub huffman_rate: f64,
    pub gain: f64,
    pub empirical_gain: f64,
    pub signaling_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: String,
    pub n: usize,
    pub mode: SimMode,
    pub links: Vec<LinkReport>,
    pub errors: u64,
    pub trials: u64,
    /// Probability (or sample frequency) of decoding failures.
    pub error_mass: f64,
    pub max_distortion: Option<f64>,
    pub feedback: Option<FeedbackStats>,
}

fn f6(v: f64) -> String {
    let v = if v.abs() < 5e-7 { 0.0 } else { v };
    format!("{v:.6}")
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "mode: {}", self.mode)?;
        match self.mode {
            SimMode::Sampled { seed, .. } => writeln!(f, "seed: {seed}")?,
            SimMode::Exhaustive => writeln!(f, "seed: none")?,
        }
        for l in &self.links {
            let bound = l.bound.map(f6).unwrap_or_else(|| "n/a".into());
            writeln!(
                f,
                "link {} (stage {}): rate {} empirical {} bound {} [{}]",
                l.name,
                l.stage,
                f6(l.rate),
                f6(l.empirical),
                bound,
                l.label
            )?;
        }
        writeln!(f, "errors: {}/{}", self.errors, self.trials)?;
        writeln!(f, "error mass: {}", f6(self.error_mass))?;
        if let Some(d) = self.max_distortion {
            writeln!(f, "max distortion: {}", f6(d))?;
        }
        if let Some(s) = &self.feedback {
            writeln!(f, "P_a: {}", f6(s.p_a))?;
            writeln!(f, "empirical P_a: {}", f6(s.empirical_p_a))?;
            writeln!(f, "blocks using c': {}", s.prime_blocks)?;
            writeln!(f, "blocks using c_min: {}", s.min_blocks)?;
            writeln!(f, "rate without feedback: {}", f6(s.rate_without))?;
            writeln!(f, "rate with feedback: {}", f6(s.rate_with))?;
            writeln!(f, "charged rate: {}", f6(s.charged_rate))?;
            writeln!(f, "huffman rate: {}", f6(s.huffman_rate))?;
            writeln!(f, "gain: {}", f6(s.gain))?;
            writeln!(f, "empirical gain: {}", f6(s.empirical_gain))?;
            writeln!(f, "signaling: {} bits/block (not counted)", s.signaling_bits)?;
        }
        Ok(())
    }
}

/// Per completed-tree node, the singleton bound of its stage and its label.
/// Nodes whose bound is too costly to compute get `None`.
fn node_bounds(scenario: &Scenario, plan: &Plan) -> HashMap<usize, (Option<f64>, String)> {
    let mut out = HashMap::new();
    let budget = plan.options.budget.min(200_000);
    for stage in 1..=plan.tree.depth {
        let nodes = plan.tree.stage_nodes(stage);
        let model = scenario
            .model(plan.options.function)
            .and_then(|m| m.group(&plan.tree.connection_set(stage)));
        for (j, &v) in nodes.iter().enumerate() {
            let r = match &model {
                Ok(m) => finite_n_search(m, &[j], plan.options.n, true, budget),
                Err(_) => Err(Error::invalid("tree", "cannot group sources")),
            };
            out.insert(
                v,
                match r {
                    Ok(b) => (Some(b.bits), b.label.to_string()),
                    Err(e) if e.is_budget() => (None, "over budget".into()),
                    Err(_) => (None, "unavailable".into()),
                },
            );
        }
    }
    out
}

pub fn simulate(scenario: &Scenario, plan: &Plan, mode: SimMode) -> Result<SimReport> {
    let (cells, trials) = workload(&plan.block, mode)?;
    let n = plan.options.n;
    // evaluate each distinct input once, in parallel; merge in input order
    let outcomes: Vec<(HashMap<usize, Option<usize>>, bool)> = cells
        .par_iter()
        .map(|&(cell, _, _)| {
            let coords = plan.block.coords(cell);
            let colors = plan.node_colors(&coords);
            let ok = plan.decode(&coords) == Some(plan.block.values()[cell]);
            (colors, ok)
        })
        .collect();

    let mut errors = 0;
    let mut error_mass = 0.0;
    let mut streams: HashMap<usize, BTreeMap<Option<usize>, f64>> = HashMap::new();
    for ((_, w, count), (colors, ok)) in cells.iter().zip(&outcomes) {
        if !ok {
            errors += count;
            error_mass += w;
        }
        for (&v, &c) in colors {
            *streams.entry(v).or_default().entry(c).or_default() += w;
        }
    }
    let node_stats: HashMap<usize, (f64, f64)> = streams
        .iter()
        .map(|(&v, s)| {
            let w: Vec<f64> = s.values().copied().collect();
            (v, (entropy_of(&w) / n as f64, average_length(&w) / n as f64))
        })
        .collect();

    let bounds = node_bounds(scenario, plan);
    let mut links = Vec::new();
    for (name, chain) in plan.tree.link_map() {
        let stage = chain.iter().map(|&v| plan.tree.nodes[v].depth).min().expect("nonempty chain");
        let rate = chain.iter().map(|&v| node_stats[&v].0).fold(f64::INFINITY, f64::min);
        let empirical = chain.iter().map(|&v| node_stats[&v].1).fold(f64::INFINITY, f64::min);
        let bound = chain
            .iter()
            .filter_map(|v| bounds[v].0)
            .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b))));
        let label = if chain.iter().all(|v| bounds[v].1 == BoundLabel::Exact.to_string()) {
            BoundLabel::Exact.to_string()
        } else {
            bounds[&chain[0]].1.clone()
        };
        links.push(LinkReport {
            name,
            stage,
            rate,
            empirical,
            bound,
            label,
        });
    }
    links.sort_by(|a, b| a.stage.cmp(&b.stage).then(a.name.cmp(&b.name)));
    Ok(SimReport {
        scenario: scenario.hash(),
        n,
        mode,
        links,
        errors,
        trials,
        error_mass,
        max_distortion: None,
        feedback: None,
    })
}
