//! Deterministic binary Huffman code lengths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

struct Item {
    weight: f64,
    id: usize,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    // reversed: the heap pops the lightest, then the lowest id
    fn cmp(&self, other: &Self) -> Ordering {
        other.weight.total_cmp(&self.weight).then(other.id.cmp(&self.id))
    }
}

/// Code length per symbol. Zero-weight symbols get no codeword (length 0);
/// a lone symbol needs no bits at all.
pub fn code_lengths(weights: &[f64]) -> Vec<u32> {
    let mut lengths = vec![0; weights.len()];
    let live: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    if live.len() < 2 {
        return lengths;
    }
    let mut parent: Vec<usize> = vec![usize::MAX; weights.len()];
    let mut heap: BinaryHeap<Item> = live.iter().map(|&i| Item { weight: weights[i], id: i }).collect();
    while heap.len() > 1 {
        let a = heap.pop().expect("two items");
        let b = heap.pop().expect("two items");
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a.id] = id;
        parent[b.id] = id;
        heap.push(Item {
            weight: a.weight + b.weight,
            id,
        });
    }
    for &i in &live {
        let mut v = i;
        while parent[v] != usize::MAX {
            lengths[i] += 1;
            v = parent[v];
        }
    }
    lengths
}

/// Expected codeword length under the (possibly unnormalized) weights.
pub fn average_length(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    code_lengths(weights)
        .iter()
        .zip(weights)
        .map(|(&l, &w)| l as f64 * w)
        .sum::<f64>()
        / total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_weights_meet_entropy() {
        assert_eq!(code_lengths(&[0.5, 0.25, 0.125, 0.125]), vec![1, 2, 3, 3]);
        assert!((average_length(&[0.5, 0.25, 0.125, 0.125]) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_streams_are_free() {
        assert_eq!(code_lengths(&[0.0, 1.0]), vec![0, 0]);
        assert_eq!(average_length(&[]), 0.0);
    }

    #[test]
    fn kraft_holds() {
        let w = [0.3, 0.1, 0.2, 0.05, 0.05, 0.3];
        let s: f64 = code_lengths(&w).iter().map(|&l| 0.5f64.powi(l as i32)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
