use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DirectedGraph, NodeId};
use crate::error::{Error, Result};

/// Neuron class taxonomy; anything unrecognised maps to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeCategory {
    Sensory,
    Inter,
    Motor,
    SexSpecific,
    Other,
}

impl NodeCategory {
    pub const ALL: [NodeCategory; 5] = [
        NodeCategory::Sensory,
        NodeCategory::Inter,
        NodeCategory::Motor,
        NodeCategory::SexSpecific,
        NodeCategory::Other,
    ];

    pub fn parse(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "sensory" | "sensory-neuron" => NodeCategory::Sensory,
            "inter" | "interneuron" | "inter-neuron" => NodeCategory::Inter,
            "motor" | "motor-neuron" | "motorneuron" => NodeCategory::Motor,
            "sex-specific" | "sexspecific" => NodeCategory::SexSpecific,
            _ => NodeCategory::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeCategory::Sensory => "sensory",
            NodeCategory::Inter => "inter",
            NodeCategory::Motor => "motor",
            NodeCategory::SexSpecific => "sex-specific",
            NodeCategory::Other => "other",
        }
    }
}

impl fmt::Display for NodeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a metadata CSV, before it is joined to a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataRecord {
    pub label: String,
    pub category: NodeCategory,
    pub position: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetadata {
    pub node: NodeId,
    pub label: String,
    pub category: NodeCategory,
    pub position: Option<f64>,
}

pub fn load_metadata(path: &Path) -> Result<Vec<MetadataRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_metadata(&text, path)
}

/// Parses `label,category,position` rows. A first row whose label column is
/// literally `label` is treated as a header; position may be empty.
pub fn parse_metadata(text: &str, origin: &Path) -> Result<Vec<MetadataRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(idx + 1, |p| p.line() as usize);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = row.position().map_or(idx + 1, |p| p.line() as usize);
        if idx == 0 && row.get(0).is_some_and(|f| f.eq_ignore_ascii_case("label")) {
            continue;
        }
        if row.len() < 2 || row.len() > 3 {
            return Err(Error::parse(origin, line, "expected 'label,category[,position]'"));
        }
        let position = match row.get(2) {
            None | Some("") => None,
            Some(p) => Some(
                p.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(origin, line, format!("invalid position '{p}'")))?,
            ),
        };
        records.push(MetadataRecord {
            label: row[0].to_string(),
            category: NodeCategory::parse(&row[1]),
            position,
        });
    }
    Ok(records)
}

/// Matches metadata rows to graph nodes by label.
///
/// Both directions must match: every graph label needs a row and every row
/// must name a graph node. Unlabeled graphs match on the decimal node id.
pub fn join_metadata(g: &DirectedGraph, records: &[MetadataRecord]) -> Result<Vec<NodeMetadata>> {
    let mut by_label: BTreeMap<&str, &MetadataRecord> = BTreeMap::new();
    let mut duplicates = BTreeSet::new();
    for r in records {
        if by_label.insert(r.label.as_str(), r).is_some() {
            duplicates.insert(r.label.clone());
        }
    }
    if !duplicates.is_empty() {
        return Err(Error::Validation(format!("duplicate metadata labels: {duplicates:?}")));
    }

    let graph_labels: Vec<String> = (0..g.n_nodes()).map(|i| g.label(i)).collect();
    let known: BTreeSet<&str> = graph_labels.iter().map(String::as_str).collect();
    let missing_metadata: Vec<String> = graph_labels
        .iter()
        .filter(|l| !by_label.contains_key(l.as_str()))
        .cloned()
        .collect();
    let unknown_labels: Vec<String> = by_label
        .keys()
        .filter(|l| !known.contains(*l))
        .map(|l| l.to_string())
        .collect();
    if !missing_metadata.is_empty() || !unknown_labels.is_empty() {
        return Err(Error::Join {
            missing_metadata,
            unknown_labels,
        });
    }

    Ok(graph_labels
        .into_iter()
        .enumerate()
        .map(|(node, label)| {
            let r = by_label[label.as_str()];
            NodeMetadata {
                node,
                category: r.category,
                position: r.position,
                label,
            }
        })
        .collect())
}
