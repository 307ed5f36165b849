//! The directed modularity operator `B = A - k_out k_inᵀ / m` and the
//! (bi)modularity indices evaluated on it.
//!
//! Dense mode materializes `B`. Implicit mode keeps `A` in CSR/CSC form and
//! applies the rank-one null-model correction on the fly, so products cost
//! `O(nnz + n)`.
//!
//! Reduction order of every product is fixed: sparse rows are accumulated in
//! edge order, dense rows and all length-`n` dot products use
//! [`pairwise_sum`](crate::numeric::pairwise_sum). Results never depend on
//! thread count.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, NodeId};
use crate::numeric::{dot, pairwise_sum, pairwise_sum_by};

/// Largest `n` for which a dense `B` is built by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    Dense,
    Implicit,
}

impl OperatorMode {
    /// Dense up to `cap` nodes, implicit beyond.
    pub fn auto(n_nodes: usize, cap: usize) -> Self {
        if n_nodes <= cap {
            OperatorMode::Dense
        } else {
            OperatorMode::Implicit
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModularityOperator {
    n: usize,
    edges: Vec<Edge>,
    row_ptr: Vec<usize>,
    // edge ids ordered by (target, source), with offsets per target
    col_edges: Vec<usize>,
    col_ptr: Vec<usize>,
    out_degree: Vec<f64>,
    in_degree: Vec<f64>,
    m: f64,
    dense: Option<DMatrix<f64>>,
}

pub fn build_modularity(g: &DirectedGraph, mode: OperatorMode) -> Result<ModularityOperator> {
    build_modularity_with_cap(g, mode, DEFAULT_DENSE_CAP)
}

pub fn build_modularity_with_cap(
    g: &DirectedGraph,
    mode: OperatorMode,
    dense_cap: usize,
) -> Result<ModularityOperator> {
    let m = g.total_weight();
    if m.is_nan() || m <= 0.0 {
        return Err(Error::DegenerateGraph("total edge weight m is zero".into()));
    }
    let n = g.n_nodes();
    if mode == OperatorMode::Dense && n > dense_cap {
        return Err(Error::Argument(format!(
            "dense modularity matrix requested for {n} nodes, above the cap of {dense_cap}; use implicit mode"
        )));
    }

    let edges = g.edges().to_vec();
    let mut row_ptr = vec![0usize; n + 1];
    let mut col_ptr = vec![0usize; n + 1];
    for e in &edges {
        row_ptr[e.source + 1] += 1;
        col_ptr[e.target + 1] += 1;
    }
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
        col_ptr[i + 1] += col_ptr[i];
    }
    let mut col_edges: Vec<usize> = (0..edges.len()).collect();
    col_edges.sort_by_key(|&id| (edges[id].target, edges[id].source));

    let mut op = ModularityOperator {
        n,
        edges,
        row_ptr,
        col_edges,
        col_ptr,
        out_degree: g.out_degree().to_vec(),
        in_degree: g.in_degree().to_vec(),
        m,
        dense: None,
    };
    if mode == OperatorMode::Dense {
        op.dense = Some(op.materialize());
    }
    Ok(op)
}

impl ModularityOperator {
    pub fn mode(&self) -> OperatorMode {
        if self.dense.is_some() {
            OperatorMode::Dense
        } else {
            OperatorMode::Implicit
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_weight(&self) -> f64 {
        self.m
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_degree(&self) -> &[f64] {
        &self.out_degree
    }

    pub fn in_degree(&self) -> &[f64] {
        &self.in_degree
    }

    fn null_term(&self, i: NodeId, j: NodeId) -> f64 {
        self.out_degree[i] * self.in_degree[j] / self.m
    }

    fn adjacency(&self, i: NodeId, j: NodeId) -> f64 {
        let row = &self.edges[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search_by_key(&j, |e| e.target)
            .map_or(0.0, |k| row[k].weight)
    }

    /// `B_ij`.
    pub fn entry(&self, i: NodeId, j: NodeId) -> f64 {
        match &self.dense {
            Some(b) => b[(i, j)],
            None => self.adjacency(i, j) - self.null_term(i, j),
        }
    }

    /// `B_ij` at the position of edge `edge_id`.
    pub fn edge_entry(&self, edge_id: usize) -> f64 {
        let e = &self.edges[edge_id];
        e.weight - self.null_term(e.source, e.target)
    }

    fn materialize(&self) -> DMatrix<f64> {
        let mut b = DMatrix::from_fn(self.n, self.n, |i, j| -self.null_term(i, j));
        for e in &self.edges {
            b[(e.source, e.target)] += e.weight;
        }
        b
    }

    /// Dense copy of `B`, materialized on demand in implicit mode.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.dense {
            Some(b) => b.clone(),
            None => self.materialize(),
        }
    }

    pub fn dense(&self) -> Option<&DMatrix<f64>> {
        self.dense.as_ref()
    }

    /// `B x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must equal node count");
        match &self.dense {
            Some(b) => (0..self.n)
                .map(|i| pairwise_sum_by(self.n, |j| b[(i, j)] * x[j]))
                .collect(),
            None => {
                let scale = dot(&self.in_degree, x) / self.m;
                (0..self.n)
                    .map(|i| {
                        let row = &self.edges[self.row_ptr[i]..self.row_ptr[i + 1]];
                        let ax = row.iter().fold(0.0, |acc, e| acc + e.weight * x[e.target]);
                        ax - self.out_degree[i] * scale
                    })
                    .collect()
            }
        }
    }

    /// `Bᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must equal node count");
        match &self.dense {
            Some(b) => (0..self.n)
                .map(|j| pairwise_sum_by(self.n, |i| b[(i, j)] * x[i]))
                .collect(),
            None => {
                let scale = dot(&self.out_degree, x) / self.m;
                (0..self.n)
                    .map(|j| {
                        let col = &self.col_edges[self.col_ptr[j]..self.col_ptr[j + 1]];
                        let atx = col.iter().fold(0.0, |acc, &id| {
                            let e = &self.edges[id];
                            acc + e.weight * x[e.source]
                        });
                        atx - self.in_degree[j] * scale
                    })
                    .collect()
            }
        }
    }

    /// `B X` for a block of column vectors.
    pub fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.dense {
            Some(b) => b * x,
            None => self.apply_columns(x, |v| self.apply(v)),
        }
    }

    /// `Bᵀ X` for a block of column vectors.
    pub fn apply_transpose_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.dense {
            Some(b) => b.tr_mul(x),
            None => self.apply_columns(x, |v| self.apply_transpose(v)),
        }
    }

    fn apply_columns(&self, x: &DMatrix<f64>, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for (k, col) in x.column_iter().enumerate() {
            let v: Vec<f64> = col.iter().copied().collect();
            out.set_column(k, &nalgebra::DVector::from_vec(f(&v)));
        }
        out
    }

    /// Dense `B` in Matrix Market array format (column-major).
    pub fn to_matrix_market(&self) -> String {
        let b = self.to_dense();
        let mut out = String::from("%%MatrixMarket matrix array real general\n");
        let _ = writeln!(out, "{} {}", self.n, self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                let _ = writeln!(out, "{:e}", b[(i, j)]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    /// Entries in `{+1, -1}`.
    Discrete,
    /// Unit Euclidean norm.
    Relaxed,
}

/// Separator vectors for the sending and receiving partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPair {
    pub s_out: Vec<f64>,
    pub s_in: Vec<f64>,
    pub kind: PartitionKind,
}

impl PartitionPair {
    pub fn discrete(s_out: Vec<f64>, s_in: Vec<f64>) -> Result<Self> {
        if s_out.iter().chain(&s_in).any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::Argument("discrete separator entries must be +1 or -1".into()));
        }
        Self::checked(s_out, s_in, PartitionKind::Discrete)
    }

    pub fn relaxed(s_out: Vec<f64>, s_in: Vec<f64>) -> Result<Self> {
        for (name, v) in [("s_out", &s_out), ("s_in", &s_in)] {
            let norm = crate::numeric::norm(v);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Argument(format!("relaxed {name} must have unit norm, got {norm}")));
            }
        }
        Self::checked(s_out, s_in, PartitionKind::Relaxed)
    }

    /// Builds a discrete pair from boolean memberships (`true` maps to `+1`).
    pub fn from_sides(out_side: &[bool], in_side: &[bool]) -> Result<Self> {
        let sign = |b: &bool| if *b { 1.0 } else { -1.0 };
        Self::discrete(out_side.iter().map(sign).collect(), in_side.iter().map(sign).collect())
    }

    fn checked(s_out: Vec<f64>, s_in: Vec<f64>, kind: PartitionKind) -> Result<Self> {
        if s_out.len() != s_in.len() {
            return Err(Error::Argument(format!(
                "separator lengths differ: {} vs {}",
                s_out.len(),
                s_in.len()
            )));
        }
        Ok(PartitionPair { s_out, s_in, kind })
    }
}

/// `(s_out)ᵀ B s_in / (2m)`.
pub fn bimodularity_index(op: &ModularityOperator, p: &PartitionPair) -> Result<f64> {
    bilinear_index(op, &p.s_out, &p.s_in)
}

/// Same as [`bimodularity_index`] on raw slices of any norm.
pub fn bilinear_index(op: &ModularityOperator, s_out: &[f64], s_in: &[f64]) -> Result<f64> {
    if s_out.len() != op.n || s_in.len() != op.n {
        return Err(Error::Argument(format!(
            "separator lengths ({}, {}) do not match node count {}",
            s_out.len(),
            s_in.len(),
            op.n
        )));
    }
    Ok(dot(s_out, &op.apply(s_in)) / (2.0 * op.m))
}

/// Contribution of an edge subset: `(1/m) Σ_{(i,j) ∈ subset} B_ij`.
///
/// Only realized edges are scored, so the values of the clusters of any edge
/// partition add up to `(1/m) Σ_{(i,j) ∈ E} B_ij`.
pub fn community_bimodularity(op: &ModularityOperator, edge_ids: &[usize]) -> Result<f64> {
    if let Some(&bad) = edge_ids.iter().find(|&&id| id >= op.edges.len()) {
        return Err(Error::Argument(format!(
            "edge id {bad} out of range (graph has {} edges)",
            op.edges.len()
        )));
    }
    Ok(pairwise_sum_by(edge_ids.len(), |k| op.edge_entry(edge_ids[k])) / op.m)
}

/// Newman modularity of a node labelling on a symmetric graph.
///
/// With `m = Σ_ij A_ij` (each undirected edge counted in both directions),
/// `Q = Σ_c [ w_c / m - (K_c / m)² ]` where `w_c` is the weight inside `c` and
/// `K_c` its degree total.
pub fn undirected_modularity(g: &DirectedGraph, labels: &[usize]) -> Result<f64> {
    if labels.len() != g.n_nodes() {
        return Err(Error::Argument(format!(
            "{} labels for {} nodes",
            labels.len(),
            g.n_nodes()
        )));
    }
    if !g.is_symmetric() {
        return Err(Error::Validation("undirected modularity needs a symmetric graph".into()));
    }
    let m = g.total_weight();
    if m.is_nan() || m <= 0.0 {
        return Err(Error::DegenerateGraph("total edge weight m is zero".into()));
    }
    let n_comm = labels.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![Vec::new(); n_comm];
    let mut degree = vec![Vec::new(); n_comm];
    for e in g.edges() {
        if labels[e.source] == labels[e.target] {
            inside[labels[e.source]].push(e.weight);
        }
    }
    for (i, &k) in g.out_degree().iter().enumerate() {
        degree[labels[i]].push(k);
    }
    let terms: Vec<f64> = (0..n_comm)
        .map(|c| {
            let frac = pairwise_sum(&degree[c]) / m;
            pairwise_sum(&inside[c]) / m - frac * frac
        })
        .collect();
    Ok(pairwise_sum(&terms))
}
