//! Directed weighted graph model.
//!
//! Edges are stored merged and sorted by `(source, target)`. Degrees and the
//! total weight are computed once at construction with [`pairwise_sum`] in
//! that edge order, so every consumer sees the same `k_out`, `k_in` and `m`.

mod io;
mod metadata;

pub use io::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list, EdgeListFormat};
pub use metadata::{join_metadata, load_metadata, parse_metadata, MetadataRecord, NodeCategory, NodeMetadata};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n_nodes: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<String>>,
    out_degree: Vec<f64>,
    in_degree: Vec<f64>,
    total_weight: f64,
}

impl DirectedGraph {
    /// Builds a graph from raw `(source, target, weight)` triples.
    ///
    /// Duplicate pairs are merged by summing weights. Weights must be finite
    /// and non-negative; node ids must be `< n_nodes`. A graph with zero total
    /// weight is accepted here and rejected by the consumers that need `m > 0`.
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut raw: Vec<Edge> = Vec::new();
        for (source, target, weight) in edges {
            if source >= n_nodes || target >= n_nodes {
                return Err(Error::Validation(format!(
                    "edge ({source}, {target}) references a node outside 0..{n_nodes}"
                )));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::Validation(format!(
                    "edge ({source}, {target}) has invalid weight {weight}"
                )));
            }
            raw.push(Edge { source, target, weight });
        }
        // stable sort keeps file order among duplicates, so merged sums are reproducible
        raw.sort_by_key(|e| (e.source, e.target));

        let mut merged: Vec<Edge> = Vec::with_capacity(raw.len());
        let mut pending: Vec<f64> = Vec::new();
        for e in raw {
            match merged.last_mut() {
                Some(last) if last.source == e.source && last.target == e.target => {
                    pending.push(e.weight);
                }
                _ => {
                    if let Some(last) = merged.last_mut() {
                        if pending.len() > 1 {
                            last.weight = pairwise_sum(&pending);
                        }
                    }
                    pending.clear();
                    pending.push(e.weight);
                    merged.push(e);
                }
            }
        }
        if let Some(last) = merged.last_mut() {
            if pending.len() > 1 {
                last.weight = pairwise_sum(&pending);
            }
        }

        Ok(Self::from_sorted(n_nodes, merged, None))
    }

    fn from_sorted(n_nodes: usize, edges: Vec<Edge>, labels: Option<Vec<String>>) -> Self {
        let mut out_terms: Vec<Vec<f64>> = vec![Vec::new(); n_nodes];
        let mut in_terms: Vec<Vec<f64>> = vec![Vec::new(); n_nodes];
        for e in &edges {
            out_terms[e.source].push(e.weight);
            in_terms[e.target].push(e.weight);
        }
        let out_degree: Vec<f64> = out_terms.iter().map(|t| pairwise_sum(t)).collect();
        let in_degree: Vec<f64> = in_terms.iter().map(|t| pairwise_sum(t)).collect();
        let total_weight = pairwise_sum(&out_degree);
        DirectedGraph {
            n_nodes,
            edges,
            labels,
            out_degree,
            in_degree,
            total_weight,
        }
    }

    /// Attaches one label per node.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_nodes {
            return Err(Error::Validation(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n_nodes
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(source, target)`; the position in this slice is the edge id.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `node`, or its numeric id when the graph is unlabeled.
    pub fn label(&self, node: NodeId) -> String {
        match &self.labels {
            Some(l) => l[node].clone(),
            None => node.to_string(),
        }
    }

    pub fn out_degree(&self) -> &[f64] {
        &self.out_degree
    }

    pub fn in_degree(&self) -> &[f64] {
        &self.in_degree
    }

    /// `m`, the sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Weight of the edge `source -> target`, zero if absent.
    pub fn weight(&self, source: NodeId, target: NodeId) -> f64 {
        self.edge_id(source, target)
            .map(|id| self.edges[id].weight)
            .unwrap_or(0.0)
    }

    pub fn edge_id(&self, source: NodeId, target: NodeId) -> Option<usize> {
        self.edges
            .binary_search_by_key(&(source, target), |e| (e.source, e.target))
            .ok()
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.source == e.target).count()
    }

    pub fn without_self_loops(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| e.source != e.target)
            .collect();
        Self::from_sorted(self.n_nodes, edges, self.labels.clone())
    }

    /// `A + Aᵀ`. Self-loops end up with doubled weight.
    pub fn symmetrized(&self) -> Self {
        let both = self
            .edges
            .iter()
            .flat_map(|e| [(e.source, e.target, e.weight), (e.target, e.source, e.weight)]);
        let mut g = Self::from_edges(self.n_nodes, both).expect("edges already validated");
        g.labels = self.labels.clone();
        g
    }

    /// True when `A_ij == A_ji` for every pair.
    pub fn is_symmetric(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.edge_id(e.target, e.source).map(|id| self.edges[id].weight) == Some(e.weight))
    }

    /// Edges whose reverse edge also exists (self-loops excluded).
    pub fn reciprocated_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.source != e.target && self.edge_id(e.target, e.source).is_some())
            .count()
    }

    /// Every weight multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Argument(format!("scale factor must be positive, got {factor}")));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: e.weight * factor,
                ..*e
            })
            .collect();
        Ok(Self::from_sorted(self.n_nodes, edges, self.labels.clone()))
    }

    /// Weak connectivity over nodes that carry at least one edge; isolated
    /// nodes count as separate components.
    pub fn is_weakly_connected(&self) -> bool {
        if self.n_nodes == 0 {
            return true;
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); self.n_nodes];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        let mut seen = vec![false; self.n_nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_nodes
    }
}

/// `(k_out, k_in, m)` of the graph.
pub fn degree_sequences(g: &DirectedGraph) -> (Vec<f64>, Vec<f64>, f64) {
    (g.out_degree.clone(), g.in_degree.clone(), g.total_weight)
}
