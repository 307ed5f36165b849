//! Connectome analysis report: spectrum, first-component node embedding,
//! ranked bicommunities with neuron-class composition and body-position
//! histograms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bicommunity::{detect, node_role_summary, DetectConfig, Detection};
use crate::error::Result;
use crate::graph::{join_metadata, load_edge_list, load_metadata, DirectedGraph, EdgeListFormat, NodeCategory, NodeMetadata};
use crate::modularity::OperatorMode;
use crate::spectral::{spectrum_report, SpectrumEntry, SvdConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CelegansConfig {
    pub n_components: usize,
    pub n_clusters: usize,
    pub seed: u64,
    pub n_restarts: usize,
    /// Singular values listed in the report (at least `n_components`).
    pub spectrum_size: usize,
    pub top: usize,
    pub histogram_bins: usize,
    pub strip_self_loops: bool,
}

impl Default for CelegansConfig {
    fn default() -> Self {
        CelegansConfig {
            n_components: 5,
            n_clusters: 5,
            seed: 42,
            n_restarts: 50,
            spectrum_size: 10,
            top: 3,
            histogram_bins: 10,
            strip_self_loops: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub total_weight: f64,
    pub reciprocated_edges: usize,
    pub asymmetric_edges: usize,
    pub self_loops: usize,
    pub weakly_connected: bool,
}

impl GraphSummary {
    pub fn of(g: &DirectedGraph) -> Self {
        let reciprocated = g.reciprocated_edge_count();
        let self_loops = g.self_loop_count();
        GraphSummary {
            n_nodes: g.n_nodes(),
            n_edges: g.n_edges(),
            total_weight: g.total_weight(),
            reciprocated_edges: reciprocated,
            asymmetric_edges: g.n_edges() - reciprocated - self_loops,
            self_loops,
            weakly_connected: g.is_weakly_connected(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRow {
    pub node: usize,
    pub label: String,
    pub category: NodeCategory,
    pub u1: f64,
    pub v1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeBalance {
    pub label: String,
    pub sending_fraction: f64,
    pub receiving_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicommunitySummary {
    pub rank: usize,
    pub cluster_id: usize,
    pub score: f64,
    pub top: bool,
    pub n_edges: usize,
    pub sending: Vec<String>,
    pub receiving: Vec<String>,
    pub sending_composition: BTreeMap<NodeCategory, usize>,
    pub receiving_composition: BTreeMap<NodeCategory, usize>,
    pub node_balance: Vec<NodeBalance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sending_positions: Option<Histogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receiving_positions: Option<Histogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub n_components: usize,
    pub requested_clusters: usize,
    pub realized_clusters: usize,
    pub seed: u64,
    pub graph: GraphSummary,
    pub spectrum: Vec<SpectrumEntry>,
    pub first_component: Vec<EmbeddingRow>,
    pub bicommunities: Vec<BicommunitySummary>,
}

#[derive(Debug, Clone)]
pub struct CelegansRun {
    pub graph: DirectedGraph,
    pub metadata: Vec<NodeMetadata>,
    pub detection: Detection,
    pub report: AnalysisReport,
}

pub fn run_celegans(edge_file: &Path, metadata_file: &Path, cfg: &CelegansConfig) -> Result<CelegansRun> {
    let g = load_edge_list(edge_file, EdgeListFormat::from_path(edge_file), false)?;
    let records = load_metadata(metadata_file)?;
    analyze(g, &records, cfg)
}

/// Same as [`run_celegans`] on an already loaded graph and metadata table.
pub fn analyze(g: DirectedGraph, records: &[crate::graph::MetadataRecord], cfg: &CelegansConfig) -> Result<CelegansRun> {
    let g = if cfg.strip_self_loops { g.without_self_loops() } else { g };
    let metadata = join_metadata(&g, records)?;
    if !g.is_weakly_connected() {
        log::warn!("graph is not weakly connected; isolated parts get their own components");
    }

    let spectrum_size = cfg.spectrum_size.max(cfg.n_components).min(g.n_nodes());
    let mut det_cfg = DetectConfig::new(cfg.n_components, cfg.n_clusters, cfg.seed);
    det_cfg.cluster.n_restarts = cfg.n_restarts;
    det_cfg.mode = OperatorMode::auto(g.n_nodes(), crate::modularity::DEFAULT_DENSE_CAP);
    det_cfg.svd = SvdConfig::new(spectrum_size);
    let detection = detect(&g, &det_cfg)?;

    let first = &detection.components[0];
    let first_component = metadata
        .iter()
        .map(|m| EmbeddingRow {
            node: m.node,
            label: m.label.clone(),
            category: m.category,
            u1: first.u[m.node],
            v1: first.v[m.node],
        })
        .collect();

    let positions: Vec<f64> = metadata.iter().filter_map(|m| m.position).collect();
    let range = positions
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &p| Some(acc.map_or((p, p), |(lo, hi)| (lo.min(p), hi.max(p)))));

    let histogram = |nodes: &mut dyn Iterator<Item = &usize>| -> Option<Histogram> {
        let (lo, hi) = range?;
        let bins = cfg.histogram_bins.max(1);
        let mut counts = vec![0; bins];
        for &v in nodes {
            if let Some(p) = metadata[v].position {
                let t = if hi > lo { (p - lo) / (hi - lo) } else { 0.0 };
                counts[((t * bins as f64) as usize).min(bins - 1)] += 1;
            }
        }
        Some(Histogram { lo, hi, counts })
    };
    let composition = |nodes: &mut dyn Iterator<Item = &usize>| {
        let mut map: BTreeMap<NodeCategory, usize> = NodeCategory::ALL.iter().map(|&c| (c, 0)).collect();
        for &v in nodes {
            *map.get_mut(&metadata[v].category).expect("all categories present") += 1;
        }
        map
    };

    let bicommunities = detection
        .bicommunities
        .iter()
        .enumerate()
        .map(|(rank, bc)| BicommunitySummary {
            rank,
            cluster_id: bc.cluster_id,
            score: bc.score,
            top: rank < cfg.top,
            n_edges: bc.edge_ids.len(),
            sending: bc.sending.iter().map(|&v| metadata[v].label.clone()).collect(),
            receiving: bc.receiving.iter().map(|&v| metadata[v].label.clone()).collect(),
            sending_composition: composition(&mut bc.sending.iter()),
            receiving_composition: composition(&mut bc.receiving.iter()),
            node_balance: node_role_summary(bc, &g)
                .into_iter()
                .map(|r| NodeBalance {
                    label: metadata[r.node].label.clone(),
                    sending_fraction: r.sending_fraction,
                    receiving_fraction: r.receiving_fraction,
                })
                .collect(),
            sending_positions: histogram(&mut bc.sending.iter()),
            receiving_positions: histogram(&mut bc.receiving.iter()),
        })
        .collect();

    let report = AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n_components: cfg.n_components,
        requested_clusters: detection.clustering.requested,
        realized_clusters: detection.clustering.realized,
        seed: cfg.seed,
        graph: GraphSummary::of(&g),
        spectrum: spectrum_report(&g, &detection.components).components,
        first_component,
        bicommunities,
    };
    Ok(CelegansRun {
        graph: g,
        metadata,
        detection,
        report,
    })
}
