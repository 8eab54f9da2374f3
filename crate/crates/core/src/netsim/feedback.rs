//! Two-mode scheme with a one-round handshake: blocks whose symbols both fall
//! in the projections of the undecodable region use a decodable coloring
//! pair, all other blocks use the cheapest pair outright.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::ccc::{build_lookup, joint_coloring_family, joint_coloring_family_on, satisfies_ccc, LookupTable};
use crate::chargraph::{characteristic_graph_of, power_graph};
use crate::coloring::{enumerate_colorings, Coloring};
use crate::error::{Error, Result};
use crate::model::{JointModel, Scenario};
use crate::netsim::huffman::code_lengths;
use crate::netsim::sim::{workload, FeedbackStats, SimMode, SimReport};
use crate::prob::{entropy_of, INTERNAL_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackPlan {
    pub n: usize,
    pub block: JointModel,
    pub c_min: Vec<Coloring>,
    pub c_prime: Vec<Coloring>,
    /// Joint color entropies per block.
    pub h_min: f64,
    pub h_prime: f64,
    /// Block cells in classes of `c_min` that break the connectivity condition.
    pub violating: Vec<usize>,
    pub a_x1: BTreeSet<usize>,
    pub a_x2: BTreeSet<usize>,
    pub p_a: f64,
    pub rate_without: f64,
    pub rate_with: f64,
    pub gain: f64,
    pub lookup_min: LookupTable,
    pub lookup_prime: LookupTable,
}

impl FeedbackPlan {
    pub fn in_a(&self, coords: &[usize]) -> bool {
        self.a_x1.contains(&coords[0]) && self.a_x2.contains(&coords[1])
    }
}

fn pair_entropy(block: &JointModel, c: &[Coloring]) -> f64 {
    let mut dist: HashMap<(usize, usize), f64> = HashMap::new();
    for cell in block.support() {
        let x = block.coords(cell);
        *dist.entry((c[0].color(x[0]), c[1].color(x[1]))).or_default() += block.pmf()[cell];
    }
    entropy_of(&dist.values().copied().collect::<Vec<_>>())
}

pub fn feedback_plan(scenario: &Scenario, n: usize, budget: u128) -> Result<FeedbackPlan> {
    let base = scenario.model(0)?;
    if base.k() != 2 {
        return Err(Error::invalid("sources", "the feedback scheme needs exactly two sources"));
    }
    let block = base.block_extend(n, budget)?;
    let options: Vec<Vec<Coloring>> = (0..2)
        .map(|i| enumerate_colorings(&power_graph(&characteristic_graph_of(&base, i), n, budget)?, budget))
        .collect::<Result<_>>()?;
    let total = options[0].len() as u128 * options[1].len() as u128;
    if total > budget {
        return Err(Error::budget("coloring pairs", total, budget));
    }
    let pairs: Vec<(usize, usize)> = (0..options[0].len())
        .flat_map(|a| (0..options[1].len()).map(move |b| (a, b)))
        .collect();
    // (entropy, decodable) for every pair, in pair order
    let scored: Vec<(f64, bool)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let c = [options[0][a].clone(), options[1][b].clone()];
            let ok = joint_coloring_family(&block, &c)
                .and_then(|f| satisfies_ccc(&f))
                .map(|v| v.holds())
                .unwrap_or(false);
            (pair_entropy(&block, &c), ok)
        })
        .collect();

    let h_min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let argmin = (0..pairs.len())
        .filter(|&i| scored[i].0 <= h_min + INTERNAL_TOL)
        .min_by_key(|&i| !scored[i].1)
        .expect("at least the trivial pair");
    let prime = (0..pairs.len())
        .filter(|&i| scored[i].1)
        .min_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0).then(a.cmp(&b)))
        .ok_or_else(|| Error::NotApplicable("no decodable coloring pair".into()))?;
    let pick = |i: usize| vec![options[0][pairs[i].0].clone(), options[1][pairs[i].1].clone()];
    let (c_min, c_prime) = (pick(argmin), pick(prime));
    let h_min = scored[argmin].0;
    let h_prime = scored[prime].0;

    // violating classes: more than one function value inside the class
    let family = joint_coloring_family(&block, &c_min)?;
    let mut violating = Vec::new();
    for class in &family.classes {
        if class.points.iter().any(|p| p.value != class.points[0].value) {
            violating.extend(class.points.iter().map(|p| p.cell));
        }
    }
    violating.sort_unstable();
    let a_x1: BTreeSet<usize> = violating.iter().map(|&c| block.coords(c)[0]).collect();
    let a_x2: BTreeSet<usize> = violating.iter().map(|&c| block.coords(c)[1]).collect();
    let in_a = |cell: usize| {
        let x = block.coords(cell);
        a_x1.contains(&x[0]) && a_x2.contains(&x[1])
    };
    let p_a: f64 = block.support().into_iter().filter(|&c| in_a(c)).map(|c| block.pmf()[c]).sum();

    let outside = joint_coloring_family_on(&block, &c_min, |c| !in_a(c))?;
    let lookup_min =
        build_lookup(&outside).map_err(|w| Error::InvalidColoring(format!("outside the handshake region: {w}")))?;
    let lookup_prime = build_lookup(&joint_coloring_family(&block, &c_prime)?)
        .map_err(|w| Error::InvalidColoring(format!("decodable pair fails: {w}")))?;

    let nf = n as f64;
    let rate_without = h_prime / nf;
    let rate_with = (p_a * h_prime + (1.0 - p_a) * h_min) / nf;
    Ok(FeedbackPlan {
        n,
        c_min,
        c_prime,
        h_min,
        h_prime,
        violating,
        p_a,
        rate_without,
        rate_with,
        gain: (1.0 - p_a) * (h_prime - h_min) / nf,
        lookup_min,
        lookup_prime,
        block,
        a_x1,
        a_x2,
    })
}

/// Code length of each color pair under the code built for one mode's pair distribution.
fn pair_code(block: &JointModel, c: &[Coloring]) -> HashMap<(usize, usize), u32> {
    let mut dist: HashMap<(usize, usize), f64> = HashMap::new();
    for cell in block.support() {
        let x = block.coords(cell);
        *dist.entry((c[0].color(x[0]), c[1].color(x[1]))).or_default() += block.pmf()[cell];
    }
    let mut keys: Vec<(usize, usize)> = dist.keys().copied().collect();
    keys.sort_unstable();
    let lengths = code_lengths(&keys.iter().map(|k| dist[k]).collect::<Vec<_>>());
    keys.into_iter().zip(lengths).collect()
}

pub fn simulate_feedback(scenario: &Scenario, plan: &FeedbackPlan, mode: SimMode) -> Result<SimReport> {
    let (cells, trials) = workload(&plan.block, mode)?;
    let code_min = pair_code(&plan.block, &plan.c_min);
    let code_prime = pair_code(&plan.block, &plan.c_prime);
    let mut errors = 0;
    let mut error_mass = 0.0;
    let (mut prime_blocks, mut min_blocks) = (0, 0);
    let (mut mass_a, mut huffman) = (0.0, 0.0);
    for &(cell, w, count) in &cells {
        let x = plan.block.coords(cell);
        // both membership bits set, echoed back by the receiver
        let use_prime = plan.in_a(&x);
        let (c, lookup, code) = if use_prime {
            prime_blocks += count;
            mass_a += w;
            (&plan.c_prime, &plan.lookup_prime, &code_prime)
        } else {
            min_blocks += count;
            (&plan.c_min, &plan.lookup_min, &code_min)
        };
        let colors = [c[0].color(x[0]), c[1].color(x[1])];
        huffman += w * code[&(colors[0], colors[1])] as f64;
        if lookup.decode(&colors) != Some(plan.block.values()[cell]) {
            errors += count;
            error_mass += w;
        }
    }
    let nf = plan.n as f64;
    let charged = (mass_a * plan.h_prime + (1.0 - mass_a) * plan.h_min) / nf;
    Ok(SimReport {
        scenario: scenario.hash(),
        n: plan.n,
        mode,
        links: Vec::new(),
        errors,
        trials,
        error_mass,
        max_distortion: None,
        feedback: Some(FeedbackStats {
            p_a: plan.p_a,
            empirical_p_a: mass_a,
            prime_blocks,
            min_blocks,
            rate_without: plan.rate_without,
            rate_with: plan.rate_with,
            charged_rate: charged,
            huffman_rate: huffman / nf,
            gain: plan.gain,
            empirical_gain: plan.rate_without - charged,
            signaling_bits: 4,
        }),
    })
}
