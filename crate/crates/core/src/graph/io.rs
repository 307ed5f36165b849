//! Edge-list and Matrix Market ingestion.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{DirectedGraph, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// Whitespace separated `src dst [weight]`.
    Tsv,
    /// Comma separated `src,dst[,weight]`.
    Csv,
    /// Matrix Market coordinate format.
    MatrixMarket,
}

impl EdgeListFormat {
    /// Guesses the format from the file extension; anything unknown is `Tsv`.
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("mtx") | Some("mm") => EdgeListFormat::MatrixMarket,
            Some("csv") => EdgeListFormat::Csv,
            _ => EdgeListFormat::Tsv,
        }
    }
}

pub fn load_edge_list(path: &Path, format: EdgeListFormat, symmetrize: bool) -> Result<DirectedGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let g = parse_edge_list(&text, format, path)?;
    if g.total_weight() <= 0.0 {
        return Err(Error::Validation(format!(
            "{}: graph has no edge weight (m = 0)",
            path.display()
        )));
    }
    Ok(if symmetrize { g.symmetrized() } else { g })
}

/// Parses edge-list text. `origin` is only used in error messages.
pub fn parse_edge_list(text: &str, format: EdgeListFormat, origin: &Path) -> Result<DirectedGraph> {
    match format {
        EdgeListFormat::Tsv => parse_delimited(text, None, origin),
        EdgeListFormat::Csv => parse_delimited(text, Some(','), origin),
        EdgeListFormat::MatrixMarket => parse_matrix_market(text, origin),
    }
}

struct RawEdge<'a> {
    line: usize,
    source: &'a str,
    target: &'a str,
    weight: f64,
}

fn parse_weight(token: Option<&str>, line: usize, origin: &Path) -> Result<f64> {
    let weight = match token {
        None => 1.0,
        Some(t) => t
            .parse::<f64>()
            .map_err(|_| Error::parse(origin, line, format!("invalid weight '{t}'")))?,
    };
    if !weight.is_finite() || weight < 0.0 {
        return Err(Error::Validation(format!(
            "{}:{line}: weight must be finite and non-negative, got {weight}",
            origin.display()
        )));
    }
    Ok(weight)
}

fn parse_delimited(text: &str, delimiter: Option<char>, origin: &Path) -> Result<DirectedGraph> {
    let mut raw = Vec::new();
    let mut declared_nodes: Option<usize> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            // `# nodes N` keeps trailing isolated nodes through save/load
            let mut words = comment.split_whitespace();
            if words.next() == Some("nodes") {
                if let Some(n) = words.next().and_then(|w| w.parse().ok()) {
                    declared_nodes = Some(n);
                }
            }
            continue;
        }
        let fields: Vec<&str> = match delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if fields.len() < 2 || fields.len() > 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 'src dst [weight]', got '{trimmed}'"),
            ));
        }
        raw.push(RawEdge {
            line: lineno,
            source: fields[0],
            target: fields[1],
            weight: parse_weight(fields.get(2).copied(), lineno, origin)?,
        });
    }

    let numeric = raw
        .iter()
        .all(|r| r.source.parse::<usize>().is_ok() && r.target.parse::<usize>().is_ok());

    if numeric {
        let mut triples = Vec::with_capacity(raw.len());
        let mut max_id = None;
        for r in &raw {
            let s: NodeId = r.source.parse().unwrap();
            let t: NodeId = r.target.parse().unwrap();
            max_id = max_id.max(Some(s.max(t)));
            triples.push((s, t, r.weight));
        }
        let implied = max_id.map_or(0, |m| m + 1);
        let n = match declared_nodes {
            Some(d) if d < implied => {
                let line = raw.iter().find(|r| r.source.parse::<usize>().unwrap() >= d
                    || r.target.parse::<usize>().unwrap() >= d)
                    .map_or(0, |r| r.line);
                return Err(Error::parse(
                    origin,
                    line,
                    format!("node id exceeds declared node count {d}"),
                ));
            }
            Some(d) => d,
            None => implied,
        };
        DirectedGraph::from_edges(n, triples)
    } else {
        let names: BTreeSet<&str> = raw.iter().flat_map(|r| [r.source, r.target]).collect();
        let labels: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let id = |name: &str| labels.binary_search_by(|l| l.as_str().cmp(name)).unwrap();
        let triples: Vec<_> = raw.iter().map(|r| (id(r.source), id(r.target), r.weight)).collect();
        DirectedGraph::from_edges(labels.len(), triples)?.with_labels(labels)
    }
}

fn parse_matrix_market(text: &str, origin: &Path) -> Result<DirectedGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 1, "empty Matrix Market file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::parse(origin, 1, "missing '%%MatrixMarket matrix' header"));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::parse(origin, 1, "only coordinate format is supported for graphs"));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(Error::parse(origin, 1, format!("unsupported field '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::parse(origin, 1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triples = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if fields.len() != 3 {
                return Err(Error::parse(origin, lineno, "expected 'rows cols nnz'"));
            }
            let parsed: Vec<usize> = fields
                .iter()
                .map(|f| f.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(origin, lineno, "invalid size line"))?;
            if parsed[0] != parsed[1] {
                return Err(Error::Validation(format!(
                    "{}: adjacency matrix must be square, got {}x{}",
                    origin.display(),
                    parsed[0],
                    parsed[1]
                )));
            }
            size = Some((parsed[0], parsed[1], parsed[2]));
            continue;
        };
        let expected = if pattern { 2 } else { 3 };
        if fields.len() != expected {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected {expected} fields, got {}", fields.len()),
            ));
        }
        let index = |f: &str| -> Result<usize> {
            match f.parse::<usize>() {
                Ok(i) if i >= 1 && i <= rows.max(cols) => Ok(i - 1),
                _ => Err(Error::parse(origin, lineno, format!("invalid index '{f}'"))),
            }
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let w = if pattern {
            1.0
        } else {
            parse_weight(Some(fields[2]), lineno, origin)?
        };
        triples.push((i, j, w));
        if symmetric && i != j {
            triples.push((j, i, w));
        }
    }
    let (n, _, _) = size.ok_or_else(|| Error::parse(origin, 1, "missing size line"))?;
    DirectedGraph::from_edges(n, triples)
}

/// Renders the graph as a TSV edge list, labels included when present.
pub fn write_edge_list(g: &DirectedGraph) -> String {
    let mut out = String::new();
    if g.labels().is_none() {
        let _ = writeln!(out, "# nodes {}", g.n_nodes());
    }
    for e in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", g.label(e.source), g.label(e.target), e.weight);
    }
    out
}

pub fn save_edge_list(g: &DirectedGraph, path: &Path) -> Result<()> {
    fs::write(path, write_edge_list(g)).map_err(|e| Error::io(path, e))
}
