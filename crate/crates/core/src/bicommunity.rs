//! Edge embedding, edge clustering and bicommunity extraction.
//!
//! Edge `(i, j)` is embedded as
//! `(μ_1 u_1[i], μ_1 v_1[j], …, μ_N u_N[i], μ_N v_N[j])`: the sending
//! coordinates of its source next to the receiving coordinates of its
//! target. Edges that share sending and receiving partitions land together;
//! a cluster's sources form `C_out` and its targets `C_in`. Edge clusters
//! are disjoint, node sets of different bicommunities may overlap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::modularity::{build_modularity, community_bimodularity, ModularityOperator, OperatorMode};
use crate::spectral::{decompose, SpectralComponent, SvdConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEmbedding {
    /// `(source, target)` per row, in graph edge order.
    pub edges: Vec<(NodeId, NodeId)>,
    pub n_components: usize,
    /// Row-major, `edges.len() × 2·n_components`.
    pub features: Vec<f64>,
}

impl EdgeEmbedding {
    pub fn dim(&self) -> usize {
        2 * self.n_components
    }

    pub fn n_rows(&self) -> usize {
        self.edges.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.features[i * d..(i + 1) * d]
    }
}

pub fn build_edge_features(
    g: &DirectedGraph,
    components: &[SpectralComponent],
    n_components: usize,
) -> Result<EdgeEmbedding> {
    if n_components == 0 {
        return Err(Error::Argument("edge embedding needs at least one component".into()));
    }
    if n_components > components.len() {
        return Err(Error::Argument(format!(
            "{n_components} components requested, {} available",
            components.len()
        )));
    }
    let comps = &components[..n_components];
    if let Some(c) = comps.iter().find(|c| c.u.len() != g.n_nodes() || c.v.len() != g.n_nodes()) {
        return Err(Error::Argument(format!(
            "component {} has {} entries, graph has {} nodes",
            c.index,
            c.u.len(),
            g.n_nodes()
        )));
    }
    let mut features = Vec::with_capacity(g.n_edges() * 2 * n_components);
    for e in g.edges() {
        for c in comps {
            features.push(c.singular_value * c.u[e.source]);
            features.push(c.singular_value * c.v[e.target]);
        }
    }
    Ok(EdgeEmbedding {
        edges: g.edges().iter().map(|e| (e.source, e.target)).collect(),
        n_components,
        features,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub n_clusters: usize,
    pub seed: u64,
    pub n_restarts: usize,
    pub max_iter: usize,
}

impl ClusterConfig {
    pub fn new(n_clusters: usize) -> Self {
        ClusterConfig {
            n_clusters,
            ..Default::default()
        }
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            n_clusters: 2,
            seed: 42,
            n_restarts: 50,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClustering {
    /// Cluster id per embedding row; ids are dense `0..realized`.
    pub assignment: Vec<usize>,
    pub requested: usize,
    pub realized: usize,
    pub inertia: f64,
}

/// k-means on the edge rows.
///
/// Rows are clustered in `(source, target)` order and cluster ids are
/// numbered by first appearance in that order, so the result does not depend
/// on the row order of the embedding. Clusters left empty are dropped.
pub fn cluster_edges(e: &EdgeEmbedding, cfg: &ClusterConfig) -> Result<EdgeClustering> {
    let n = e.n_rows();
    if n == 0 {
        return Err(Error::Argument("edge embedding is empty".into()));
    }
    if cfg.n_clusters == 0 || cfg.n_clusters > n {
        return Err(Error::Argument(format!(
            "cluster count {} must be in 1..={n}",
            cfg.n_clusters
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (e.edges[i], i));
    let canonical: Vec<f64> = order.iter().flat_map(|&i| e.row(i).iter().copied()).collect();

    let res = kmeans(
        &canonical,
        e.dim(),
        &KMeansConfig {
            k: cfg.n_clusters,
            n_restarts: cfg.n_restarts,
            seed: cfg.seed,
            max_iter: cfg.max_iter,
        },
    )?;

    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    let mut assignment = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        let next = relabel.len();
        let id = *relabel.entry(res.assignment[pos]).or_insert(next);
        assignment[row] = id;
    }
    Ok(EdgeClustering {
        assignment,
        requested: cfg.n_clusters,
        realized: relabel.len(),
        inertia: res.inertia,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRole {
    #[serde(rename = "send")]
    SendingOnly,
    #[serde(rename = "recv")]
    ReceivingOnly,
    #[serde(rename = "both")]
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bicommunity {
    pub cluster_id: usize,
    /// Sorted edge ids.
    pub edge_ids: Vec<usize>,
    pub sending: BTreeSet<NodeId>,
    pub receiving: BTreeSet<NodeId>,
    pub score: f64,
    pub roles: BTreeMap<NodeId, NodeRole>,
}

/// One bicommunity per non-empty cluster, sorted by decreasing score
/// (cluster id breaks ties).
pub fn extract_bicommunities(
    g: &DirectedGraph,
    op: &ModularityOperator,
    assignment: &[usize],
) -> Result<Vec<Bicommunity>> {
    if assignment.len() != g.n_edges() {
        return Err(Error::Argument(format!(
            "{} cluster labels for {} edges",
            assignment.len(),
            g.n_edges()
        )));
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (edge_id, &c) in assignment.iter().enumerate() {
        members.entry(c).or_default().push(edge_id);
    }
    let mut out = Vec::with_capacity(members.len());
    for (cluster_id, edge_ids) in members {
        let sending: BTreeSet<NodeId> = edge_ids.iter().map(|&id| g.edges()[id].source).collect();
        let receiving: BTreeSet<NodeId> = edge_ids.iter().map(|&id| g.edges()[id].target).collect();
        let roles = sending
            .union(&receiving)
            .map(|&v| {
                let role = match (sending.contains(&v), receiving.contains(&v)) {
                    (true, true) => NodeRole::Both,
                    (true, false) => NodeRole::SendingOnly,
                    _ => NodeRole::ReceivingOnly,
                };
                (v, role)
            })
            .collect();
        out.push(Bicommunity {
            cluster_id,
            score: community_bimodularity(op, &edge_ids)?,
            edge_ids,
            sending,
            receiving,
            roles,
        });
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.cluster_id.cmp(&b.cluster_id)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleFraction {
    pub node: NodeId,
    /// Share of the node's cluster edge endpoints where it is the source.
    pub sending_fraction: f64,
    pub receiving_fraction: f64,
}

impl RoleFraction {
    /// `sending_fraction - receiving_fraction`, in `[-1, 1]`.
    pub fn balance(&self) -> f64 {
        self.sending_fraction - self.receiving_fraction
    }
}

/// Per involved node, how often it appears as source vs target among the
/// bicommunity's edges. Sorted by node id.
pub fn node_role_summary(bc: &Bicommunity, g: &DirectedGraph) -> Vec<RoleFraction> {
    let mut counts: BTreeMap<NodeId, (usize, usize)> = BTreeMap::new();
    for &id in &bc.edge_ids {
        let e = &g.edges()[id];
        counts.entry(e.source).or_default().0 += 1;
        counts.entry(e.target).or_default().1 += 1;
    }
    counts
        .into_iter()
        .map(|(node, (s, r))| {
            let total = (s + r) as f64;
            RoleFraction {
                node,
                sending_fraction: s as f64 / total,
                receiving_fraction: r as f64 / total,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub n_components: usize,
    pub cluster: ClusterConfig,
    pub mode: OperatorMode,
    pub svd: SvdConfig,
}

impl DetectConfig {
    pub fn new(n_components: usize, n_clusters: usize, seed: u64) -> Self {
        DetectConfig {
            n_components,
            cluster: ClusterConfig {
                n_clusters,
                seed,
                ..Default::default()
            },
            mode: OperatorMode::Dense,
            svd: SvdConfig::new(n_components),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub operator: ModularityOperator,
    pub components: Vec<SpectralComponent>,
    pub embedding: EdgeEmbedding,
    pub clustering: EdgeClustering,
    pub bicommunities: Vec<Bicommunity>,
}

/// Decompose, embed, cluster and extract in one go. `cfg.svd.n_components`
/// is raised to `cfg.n_components` when smaller.
pub fn detect(g: &DirectedGraph, cfg: &DetectConfig) -> Result<Detection> {
    let operator = build_modularity(g, cfg.mode)?;
    let mut svd = cfg.svd.clone();
    svd.n_components = svd.n_components.max(cfg.n_components);
    let components = decompose(&operator, &svd)?;
    let embedding = build_edge_features(g, &components, cfg.n_components)?;
    let clustering = cluster_edges(&embedding, &cfg.cluster)?;
    let bicommunities = extract_bicommunities(g, &operator, &clustering.assignment)?;
    Ok(Detection {
        operator,
        components,
        embedding,
        clustering,
        bicommunities,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicommunityRecord {
    pub cluster_id: usize,
    pub rank: usize,
    pub score: f64,
    pub edges: Vec<[NodeId; 2]>,
    pub sending: Vec<NodeId>,
    pub receiving: Vec<NodeId>,
    pub roles: BTreeMap<NodeId, NodeRole>,
}

impl BicommunityRecord {
    pub fn new(rank: usize, bc: &Bicommunity, g: &DirectedGraph) -> Self {
        BicommunityRecord {
            cluster_id: bc.cluster_id,
            rank,
            score: bc.score,
            edges: bc
                .edge_ids
                .iter()
                .map(|&id| [g.edges()[id].source, g.edges()[id].target])
                .collect(),
            sending: bc.sending.iter().copied().collect(),
            receiving: bc.receiving.iter().copied().collect(),
            roles: bc.roles.clone(),
        }
    }
}

/// Serialized output of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub schema_version: u32,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub total_weight: f64,
    pub n_components: usize,
    pub requested_clusters: usize,
    pub realized_clusters: usize,
    pub seed: u64,
    pub n_restarts: usize,
    pub inertia: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_labels: Option<Vec<String>>,
    pub bicommunities: Vec<BicommunityRecord>,
}

impl DetectionReport {
    pub fn new(g: &DirectedGraph, cfg: &DetectConfig, det: &Detection) -> Self {
        DetectionReport {
            schema_version: 1,
            n_nodes: g.n_nodes(),
            n_edges: g.n_edges(),
            total_weight: g.total_weight(),
            n_components: cfg.n_components,
            requested_clusters: det.clustering.requested,
            realized_clusters: det.clustering.realized,
            seed: cfg.cluster.seed,
            n_restarts: cfg.cluster.n_restarts,
            inertia: det.clustering.inertia,
            node_labels: g.labels().map(<[String]>::to_vec),
            bicommunities: det
                .bicommunities
                .iter()
                .enumerate()
                .map(|(rank, bc)| BicommunityRecord::new(rank, bc, g))
                .collect(),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

/// Flat per-edge export:
/// `source,target,source_label,target_label,weight,cluster_id,rank,score`.
pub fn edge_clusters_csv(g: &DirectedGraph, bicommunities: &[Bicommunity]) -> String {
    let mut per_edge = vec![(0usize, 0usize, 0.0f64); g.n_edges()];
    for (rank, bc) in bicommunities.iter().enumerate() {
        for &id in &bc.edge_ids {
            per_edge[id] = (bc.cluster_id, rank, bc.score);
        }
    }
    let mut out = String::from("source,target,source_label,target_label,weight,cluster_id,rank,score\n");
    for (e, (c, rank, score)) in g.edges().iter().zip(per_edge) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{c},{rank},{score}",
            e.source,
            e.target,
            g.label(e.source),
            g.label(e.target),
            e.weight
        );
    }
    out
}
