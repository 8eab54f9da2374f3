//! Discrete distributions, entropies and mixed-radix indexing.
//!
//! All entropies are in bits. Tables are stored row-major with the last
//! coordinate varying fastest.

use crate::error::{Error, Result};

/// Normalization slack accepted on user supplied distributions.
pub const INPUT_TOL: f64 = 1e-9;
/// Slack used after internal renormalization and for entropy tie-breaks.
pub const INTERNAL_TOL: f64 = 1e-12;
/// Default cap on enumerated objects (block cells, coloring tuples, ...).
pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// `-m log2 m`, with the usual convention at zero.
#[inline]
pub fn phi(m: f64) -> f64 {
    if m > 0.0 {
        -m * m.log2()
    } else {
        0.0
    }
}

pub fn check_distribution(field: &str, dist: &[f64]) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::invalid(field, "empty distribution"));
    }
    for (i, &p) in dist.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::invalid(field, format!("entry {i} is {p}")));
        }
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > INPUT_TOL {
        return Err(Error::invalid(field, format!("pmf sums to {total}")));
    }
    Ok(())
}

/// Shannon entropy of a probability vector.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    check_distribution("distribution", dist)?;
    Ok(entropy_of(dist))
}

/// Entropy of a nonnegative mass vector after renormalizing it to sum one.
pub fn entropy_of(masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    masses.iter().map(|&m| phi(m / total)).sum()
}

/// Distribution of `map(X)` when `X ~ dist`. Labels are `0..=max(map)`.
pub fn pushforward(dist: &[f64], map: &[usize]) -> Result<Vec<f64>> {
    if dist.len() != map.len() {
        return Err(Error::invalid(
            "map",
            format!("map has {} entries for {} outcomes", map.len(), dist.len()),
        ));
    }
    let labels = map.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![0.0; labels];
    for (&p, &l) in dist.iter().zip(map) {
        out[l] += p;
    }
    Ok(out)
}

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub fn encode(dims: &[usize], coords: &[usize]) -> usize {
    coords
        .iter()
        .zip(dims)
        .fold(0, |acc, (&c, &d)| acc * d + c)
}

pub fn decode(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

/// Product of sizes, or a budget error if it does not fit under `limit`.
pub fn checked_product(what: &str, sizes: &[usize], limit: u128) -> Result<usize> {
    let mut total: u128 = 1;
    for &s in sizes {
        total = total.saturating_mul(s as u128);
    }
    if total > limit {
        return Err(Error::budget(what, total, limit));
    }
    Ok(total as usize)
}

/// A joint probability table over several finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl ProbTable {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::invalid("dims", "empty coordinate"));
        }
        if cells != data.len() {
            return Err(Error::invalid(
                "table",
                format!("{} entries for shape {:?}", data.len(), dims),
            ));
        }
        check_distribution("table", &data)?;
        Ok(ProbTable { dims, data })
    }

    pub(crate) fn new_unchecked(dims: Vec<usize>, data: Vec<f64>) -> Self {
        ProbTable { dims, data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.data)
    }

    /// Marginal over `axes`, coordinates kept in the given order.
    pub fn marginal(&self, axes: &[usize]) -> ProbTable {
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut out = vec![0.0; dims.iter().product()];
        for (idx, &p) in self.data.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let c = decode(&self.dims, idx);
            let sub: Vec<usize> = axes.iter().map(|&a| c[a]).collect();
            out[encode(&dims, &sub)] += p;
        }
        ProbTable::new_unchecked(dims, out)
    }

    /// `H(X_target | X_given)`.
    pub fn conditional_entropy_of(&self, target: &[usize], given: &[usize]) -> f64 {
        let mut both: Vec<usize> = given.to_vec();
        for &t in target {
            if !both.contains(&t) {
                both.push(t);
            }
        }
        let h_both = self.marginal(&both).entropy();
        let h_given = if given.is_empty() {
            0.0
        } else {
            self.marginal(given).entropy()
        };
        (h_both - h_given).max(0.0)
    }
}

/// Entropy of every coordinate but `axis`, given coordinate `axis`.
pub fn conditional_entropy(joint: &ProbTable, axis: usize) -> Result<f64> {
    if axis >= joint.dims.len() {
        return Err(Error::invalid(
            "axis",
            format!("axis {axis} out of range for {} coordinates", joint.dims.len()),
        ));
    }
    let others: Vec<usize> = (0..joint.dims.len()).filter(|&a| a != axis).collect();
    Ok(joint.conditional_entropy_of(&others, &[axis]))
}
