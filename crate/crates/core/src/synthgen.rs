//! Stochastic block graphs with directed block-to-block structure.
//!
//! Within a block every unordered node pair becomes an edge with probability
//! `p_self`, oriented from the lower to the higher node id with probability
//! `p_dir`. Between blocks listed in the structure, every unordered cross
//! pair becomes an edge with probability `p_con`, oriented along the listed
//! block direction. No pair is ever connected both ways, so `A + Aᵀ` is a
//! binary graph with densities `p_self` and `p_con`.
//!
//! The cycle structure sends block `b` to block `b - 1 (mod n_blocks)`.
//!
//! Randomness: each unordered block pair `(lo, hi)` reads its own ChaCha8
//! stream `hi·(hi+1)/2 + lo` of the seed, so adding blocks leaves the draws
//! of existing block pairs untouched.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BlockStructure {
    #[default]
    Cycle,
    /// Directed block pairs `(from, to)`.
    Custom(Vec<(usize, usize)>),
}

fn default_p_dir() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockCycleSpec {
    pub n_blocks: usize,
    pub nodes_per_block: usize,
    pub p_self: f64,
    pub p_con: f64,
    #[serde(default = "default_p_dir")]
    pub p_dir: f64,
    #[serde(default)]
    pub structure: BlockStructure,
    #[serde(default)]
    pub seed: u64,
}

impl BlockCycleSpec {
    /// 4 blocks of 50 nodes, `p_self = p_con = 0.3`, cycle structure.
    pub fn four_block_cycle(seed: u64) -> Self {
        BlockCycleSpec {
            n_blocks: 4,
            nodes_per_block: 50,
            p_self: 0.3,
            p_con: 0.3,
            p_dir: 0.5,
            structure: BlockStructure::Cycle,
            seed,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_blocks * self.nodes_per_block
    }

    /// Reads a spec from TOML, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 || self.nodes_per_block == 0 {
            return Err(Error::Validation("n_blocks and nodes_per_block must be positive".into()));
        }
        for (name, p) in [("p_self", self.p_self), ("p_con", self.p_con), ("p_dir", self.p_dir)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!("{name} = {p} is not a probability")));
            }
        }
        if let BlockStructure::Custom(pairs) = &self.structure {
            let mut seen = BTreeSet::new();
            for &(a, b) in pairs {
                if a >= self.n_blocks || b >= self.n_blocks {
                    return Err(Error::Validation(format!(
                        "block pair ({a}, {b}) references a block outside 0..{}",
                        self.n_blocks
                    )));
                }
                if a == b {
                    return Err(Error::Validation(format!("block pair ({a}, {b}) is a self pair")));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(Error::Validation(format!(
                        "blocks {a} and {b} are connected more than once"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Directed block pairs connected with density `p_con`.
    pub fn block_pairs(&self) -> Vec<(usize, usize)> {
        match &self.structure {
            BlockStructure::Custom(pairs) => pairs.clone(),
            BlockStructure::Cycle => {
                let n = self.n_blocks;
                let mut seen = BTreeSet::new();
                (0..n)
                    .map(|b| (b, (b + n - 1) % n))
                    .filter(|&(a, b)| a != b && seen.insert((a.min(b), a.max(b))))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub schema_version: u32,
    pub n_blocks: usize,
    pub node_block: Vec<usize>,
    /// `[source, target, edge_block]` with `edge_block = from·n_blocks + to`.
    pub edges: Vec<(NodeId, NodeId, usize)>,
}

impl GroundTruth {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    pub graph: DirectedGraph,
    /// Aligned with `graph.edges()`.
    pub edge_block: Vec<usize>,
    pub node_block: Vec<usize>,
}

impl SyntheticGraph {
    pub fn ground_truth(&self, n_blocks: usize) -> GroundTruth {
        GroundTruth {
            schema_version: 1,
            n_blocks,
            node_block: self.node_block.clone(),
            edges: self
                .graph
                .edges()
                .iter()
                .zip(&self.edge_block)
                .map(|(e, &b)| (e.source, e.target, b))
                .collect(),
        }
    }
}

fn stream_id(a: usize, b: usize) -> u64 {
    let (lo, hi) = (a.min(b) as u64, a.max(b) as u64);
    hi * (hi + 1) / 2 + lo
}

pub fn generate(spec: &BlockCycleSpec) -> Result<SyntheticGraph> {
    spec.validate()?;
    let npb = spec.nodes_per_block;
    let nodes = |b: usize| b * npb..(b + 1) * npb;
    let mut triples: Vec<(NodeId, NodeId, f64)> = Vec::new();

    for b in 0..spec.n_blocks {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(stream_id(b, b));
        for i in nodes(b) {
            for j in i + 1..(b + 1) * npb {
                if rng.random::<f64>() < spec.p_self {
                    if rng.random::<f64>() < spec.p_dir {
                        triples.push((i, j, 1.0));
                    } else {
                        triples.push((j, i, 1.0));
                    }
                }
            }
        }
    }

    for (from, to) in spec.block_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(stream_id(from, to));
        // iterate in (lower block, higher block) order so the stream is
        // consumed identically whichever way the pair points
        let (lo, hi) = (from.min(to), from.max(to));
        for i in nodes(lo) {
            for j in nodes(hi) {
                if rng.random::<f64>() < spec.p_con {
                    if lo == from {
                        triples.push((i, j, 1.0));
                    } else {
                        triples.push((j, i, 1.0));
                    }
                }
            }
        }
    }

    let graph = DirectedGraph::from_edges(spec.n_nodes(), triples)?;
    let node_block: Vec<usize> = (0..spec.n_nodes()).map(|v| v / npb).collect();
    let edge_block = graph
        .edges()
        .iter()
        .map(|e| node_block[e.source] * spec.n_blocks + node_block[e.target])
        .collect();
    Ok(SyntheticGraph {
        graph,
        edge_block,
        node_block,
    })
}
