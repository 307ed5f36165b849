//! Directed community detection by bimodularity.
//!
//! A directed graph's modularity matrix `B = A - k_out k_inᵀ / m` is
//! decomposed by SVD; the left and right singular vectors embed nodes as
//! senders and receivers. Edges are then embedded by concatenating the
//! scaled sending coordinates of their source with the receiving coordinates
//! of their target, and k-means on those rows yields bicommunities: edge
//! clusters whose source set maps onto their target set.
//!
//! ```
//! use bimod_core::prelude::*;
//!
//! let g = DirectedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
//! let op = build_modularity(&g, OperatorMode::Dense).unwrap();
//! let comps = decompose(&op, &SvdConfig::new(2)).unwrap();
//! assert!((comps[0].singular_value - 1.0).abs() < 1e-10);
//! ```

pub mod bicommunity;
pub mod celegans;
pub mod error;
pub mod graph;
pub mod kmeans;
pub mod metrics;
pub mod modularity;
pub mod numeric;
pub mod spectral;
pub mod svg;
pub mod synthgen;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bicommunity::{
        build_edge_features, cluster_edges, extract_bicommunities, node_role_summary, Bicommunity,
        ClusterConfig, EdgeEmbedding, NodeRole,
    };
    pub use crate::graph::{degree_sequences, load_edge_list, DirectedGraph, EdgeListFormat};
    pub use crate::modularity::{
        bimodularity_index, build_modularity, community_bimodularity, undirected_modularity,
        ModularityOperator, OperatorMode, PartitionPair,
    };
    pub use crate::spectral::{
        baseline_symmetrized, classify_component, decompose, Assortativity, SpectralComponent,
        SvdConfig,
    };
    pub use crate::synthgen::{generate, BlockCycleSpec, BlockStructure};
    pub use crate::{Error, Result};
}
