#![allow(dead_code)]

use bimod_core::graph::DirectedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph with a mix of unit, integer and real weights.
/// Always has at least one edge.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> DirectedGraph {
    let density = rng.random_range(0.1..0.6);
    let weighting = rng.random_range(0..3);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                let w = match weighting {
                    0 => 1.0,
                    1 => rng.random_range(1..5) as f64,
                    _ => rng.random_range(0.01..3.0),
                };
                edges.push((i, j, w));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, n - 1, 1.0));
    }
    DirectedGraph::from_edges(n, edges).unwrap()
}

/// Random symmetric graph without self-loops (at least one edge).
pub fn random_symmetric_graph(rng: &mut ChaCha8Rng, n: usize) -> DirectedGraph {
    let density = rng.random_range(0.15..0.6);
    let weighted = rng.random::<bool>();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let w = if weighted { rng.random_range(0.1..2.0) } else { 1.0 };
                edges.push((i, j, w));
                edges.push((j, i, w));
            }
        }
    }
    if edges.is_empty() {
        edges.extend([(0, 1, 1.0), (1, 0, 1.0)]);
    }
    DirectedGraph::from_edges(n, edges).unwrap()
}

pub fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Newman modularity by the direct double sum over node pairs:
/// Q = 1/(2M) Σ_ij [A_ij - k_i k_j / (2M)] δ(c_i, c_j), with 2M = Σ_ij A_ij.
pub fn newman_modularity_oracle(g: &DirectedGraph, labels: &[usize]) -> f64 {
    let n = g.n_nodes();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.source][e.target] = e.weight;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}
