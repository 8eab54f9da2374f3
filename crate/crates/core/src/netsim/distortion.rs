//! Lossy computation for two independent sources under a metric distortion:
//! each source colors its graph at half the allowed distortion, the receiver
//! answers with the function value at a fixed representative of the pair.

use std::collections::BTreeMap;

use crate::chargraph::d_characteristic_graph;
use crate::coloring::{Coloring, ExactOptions, Method};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graph_entropy::{graph_entropy, rate_region_one_stage, EntropyOptions, RateRegion};
use crate::model::{FunctionTable, Scenario};
use crate::netsim::plan::Strategy;
use crate::netsim::sim::{workload, LinkReport, SimMode, SimReport};
use crate::prob::{INPUT_TOL, INTERNAL_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionScheme {
    pub d: f64,
    pub graphs: Vec<Graph>,
    pub colorings: Vec<Coloring>,
    pub methods: Vec<Method>,
    /// Color pair to decoded value.
    pub decoder: BTreeMap<(usize, usize), u64>,
    /// Graph entropy of each half-distortion graph: the per-source rate bounds.
    pub bounds: Vec<f64>,
    /// Entropy of each source's colors: the achieved rates.
    pub rates: Vec<f64>,
}

/// Symmetric, zero exactly on the diagonal, and satisfies the triangle inequality.
pub fn check_metric(d: &[Vec<f64>]) -> Result<()> {
    let m = d.len();
    for a in 0..m {
        for b in 0..m {
            if (d[a][b] - d[b][a]).abs() > INPUT_TOL {
                return Err(Error::invalid("distortion", format!("not symmetric at ({a},{b})")));
            }
            if (d[a][b] == 0.0) != (a == b) {
                return Err(Error::invalid("distortion", format!("d({a},{b}) = {} breaks identity", d[a][b])));
            }
            for c in 0..m {
                if d[a][c] > d[a][b] + d[b][c] + INPUT_TOL {
                    return Err(Error::invalid(
                        "distortion",
                        format!("triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})"),
                    ));
                }
            }
        }
    }
    Ok(())
}

pub fn distortion_scheme(scenario: &Scenario, d: f64, strategy: Strategy) -> Result<DistortionScheme> {
    let table = scenario
        .distortion()
        .ok_or_else(|| Error::invalid("distortion", "scenario has no distortion table"))?;
    if scenario.sources() != 2 {
        return Err(Error::invalid("sources", "the distortion scheme needs exactly two sources"));
    }
    if !(d >= 0.0) {
        return Err(Error::invalid("D", "must be a nonnegative number"));
    }
    check_metric(table)?;
    let model = scenario.model(0)?;
    if !model.is_independent() {
        return Err(Error::invalid("pmf", "the distortion scheme needs independent sources"));
    }
    let opts = ExactOptions::default();
    let mut graphs = Vec::new();
    let mut colorings = Vec::new();
    let mut methods = Vec::new();
    let mut bounds = Vec::new();
    let mut rates = Vec::new();
    for i in 0..2 {
        let g = d_characteristic_graph(scenario, i, d / 2.0)?;
        let report = match strategy {
            Strategy::Exact => crate::coloring::min_entropy_coloring_exact(&g, &opts)?,
            Strategy::SpecialCase => match crate::coloring::min_entropy_coloring_nonzero_case(&g) {
                Err(Error::NotApplicable(_)) => crate::coloring::min_entropy_coloring_exact(&g, &opts)?,
                r => r?,
            },
            Strategy::Greedy => crate::coloring::greedy_mis_coloring(&g),
            Strategy::Trivial => {
                let c = Coloring::trivial(g.n());
                crate::coloring::ColoringReport {
                    entropy: c.entropy(g.prob()),
                    coloring: c,
                    method: Method::Trivial,
                    nodes_explored: 0,
                    optimal: false,
                }
            }
        };
        bounds.push(graph_entropy(&g, &EntropyOptions::default())?.bits);
        rates.push(report.entropy);
        colorings.push(report.coloring);
        methods.push(report.method);
        graphs.push(g);
    }

    // product support: a color pair's class is a product, so its lowest point
    // pairs the lowest positive symbol of each color
    let marg = [model.marginal(0), model.marginal(1)];
    let lowest = |i: usize| -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for x in 0..marg[i].len() {
            if marg[i][x] > 0.0 {
                m.entry(colorings[i].color(x)).or_insert(x);
            }
        }
        m
    };
    let (r1, r2) = (lowest(0), lowest(1));
    let mut decoder = BTreeMap::new();
    for (&c1, &a) in &r1 {
        for (&c2, &b) in &r2 {
            decoder.insert((c1, c2), model.values()[model.cell(&[a, b])]);
        }
    }
    Ok(DistortionScheme {
        d,
        graphs,
        colorings,
        methods,
        decoder,
        bounds,
        rates,
    })
}

pub fn simulate_distortion(scenario: &Scenario, scheme: &DistortionScheme, mode: SimMode) -> Result<SimReport> {
    let model = scenario.model(0)?;
    let table = scenario
        .distortion()
        .ok_or_else(|| Error::invalid("distortion", "scenario has no distortion table"))?;
    let (cells, trials) = workload(&model, mode)?;
    let mut errors = 0;
    let mut error_mass = 0.0;
    let mut max_d: f64 = 0.0;
    for &(cell, w, count) in &cells {
        let x = model.coords(cell);
        let colors = (scheme.colorings[0].color(x[0]), scheme.colorings[1].color(x[1]));
        let z = model.values()[cell];
        let out = scheme.decoder[&colors];
        let dist = table[z as usize][out as usize];
        max_d = max_d.max(dist);
        if dist > scheme.d + INTERNAL_TOL {
            errors += count;
            error_mass += w;
        }
    }
    let links = (0..2)
        .map(|i| LinkReport {
            name: format!("x{}", i + 1),
            stage: 1,
            rate: scheme.rates[i],
            empirical: crate::netsim::huffman::average_length(&scheme.colorings[i].distribution(&model.marginal(i))),
            bound: Some(scheme.bounds[i]),
            label: "graph entropy".into(),
        })
        .collect();
    Ok(SimReport {
        scenario: scenario.hash(),
        n: 1,
        mode,
        links,
        errors,
        trials,
        error_mass,
        max_distortion: Some(max_d),
        feedback: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FhatOutcome {
    Accepted { expected: f64, region: RateRegion },
    Rejected { expected: f64 },
}

/// Rate region for computing a fixed surrogate `fhat` losslessly, provided
/// its expected distortion from the true function is within `d`.
pub fn rate_region_for_fhat(scenario: &Scenario, fhat: &[u32], d: f64, n: usize, budget: u128) -> Result<FhatOutcome> {
    let table = scenario
        .distortion()
        .ok_or_else(|| Error::invalid("distortion", "scenario has no distortion table"))?;
    let f = &scenario.functions()[0].table;
    if fhat.len() != f.len() {
        return Err(Error::invalid(
            "fhat",
            format!("table has {} entries, domain has {}", fhat.len(), f.len()),
        ));
    }
    if let Some(&z) = fhat.iter().find(|&&z| z as usize >= table.len()) {
        return Err(Error::invalid("fhat", format!("value {z} is outside the distortion table")));
    }
    let expected: f64 = scenario
        .pmf()
        .iter()
        .zip(f.iter().zip(fhat))
        .map(|(p, (&a, &b))| p * table[a as usize][b as usize])
        .sum();
    if expected > d + INPUT_TOL {
        return Ok(FhatOutcome::Rejected { expected });
    }
    let surrogate = scenario.clone().with_functions(vec![FunctionTable {
        name: "fhat".into(),
        table: fhat.to_vec(),
    }])?;
    Ok(FhatOutcome::Accepted {
        expected,
        region: rate_region_one_stage(&surrogate, n, budget)?,
    })
}
