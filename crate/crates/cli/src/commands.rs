use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bimod_core::bicommunity::{detect as run_detect, edge_clusters_csv, Bicommunity, DetectConfig, DetectionReport};
use bimod_core::celegans::{run_celegans, AnalysisReport, CelegansConfig};
use bimod_core::graph::{load_edge_list, save_edge_list, DirectedGraph, EdgeListFormat, NodeCategory, NodeId};
use bimod_core::metrics::{adjusted_rand_index, jaccard};
use bimod_core::modularity::{build_modularity, OperatorMode, DEFAULT_DENSE_CAP};
use bimod_core::spectral::{baseline_symmetrized, components_csv, decompose as run_decompose, spectrum_report, SpectralComponent, SpectrumEntry, SvdConfig};
use bimod_core::svg::{adjacency, scatter, ScatterPoint};
use bimod_core::synthgen::{generate as run_generate, GroundTruth};
use bimod_core::{Error, Result};
use serde::Serialize;

use crate::config::{self, pick, GenerateConfig, OutputFormat, RunConfig};
use crate::{CelegansArgs, DecomposeArgs, DetectArgs, EvalArgs, GenerateArgs, GraphInput};

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn load_graph(input: &GraphInput, file: &RunConfig) -> Result<DirectedGraph> {
    let symmetrize = pick("symmetrize", file.symmetrize, input.symmetrize.then_some(true), false);
    let g = load_edge_list(&input.graph, EdgeListFormat::from_path(&input.graph), symmetrize)?;
    log::info!("{}: {} nodes, {} edges", input.graph.display(), g.n_nodes(), g.n_edges());
    Ok(g)
}

fn operator_mode(input: &GraphInput, file: &RunConfig, n: usize) -> OperatorMode {
    let flag = match (input.dense, input.implicit) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    match (file.dense, flag) {
        (None, None) => OperatorMode::auto(n, DEFAULT_DENSE_CAP),
        (f, c) => {
            if pick("dense", f, c, false) {
                OperatorMode::Dense
            } else {
                OperatorMode::Implicit
            }
        }
    }
}

fn spectrum_csv(entries: &[SpectrumEntry]) -> String {
    let mut out = String::from("index,singular_value,signed_value,assortativity,bimodularity\n");
    for e in entries {
        let kind = match e.assortativity {
            bimod_core::spectral::Assortativity::Assortative => "assortative",
            bimod_core::spectral::Assortativity::Dissortative => "dissortative",
        };
        let _ = writeln!(out, "{},{},{},{kind},{}", e.index + 1, e.singular_value, e.signed_value, e.bimodularity);
    }
    out
}

fn node_scatter(g: &DirectedGraph, first: &SpectralComponent, group: impl Fn(NodeId) -> usize, title: &str) -> String {
    let points: Vec<ScatterPoint> = (0..g.n_nodes())
        .map(|v| ScatterPoint {
            x: first.u[v],
            y: first.v[v],
            group: group(v),
            label: Some(g.label(v)),
        })
        .collect();
    scatter(&points, title, "u1 (sending)", "v1 (receiving)")
}

/// Nodes grouped by the bicommunity holding most of their outgoing edges,
/// then most of their incoming edges.
fn adjacency_svg(g: &DirectedGraph, bicommunities: &[Bicommunity], title: &str) -> String {
    let mut rank_of_edge = vec![0; g.n_edges()];
    for (rank, bc) in bicommunities.iter().enumerate() {
        for &id in &bc.edge_ids {
            rank_of_edge[id] = rank;
        }
    }
    let k = bicommunities.len().max(1);
    let mut out_counts = vec![vec![0usize; k]; g.n_nodes()];
    let mut in_counts = vec![vec![0usize; k]; g.n_nodes()];
    for (e, &r) in g.edges().iter().zip(&rank_of_edge) {
        out_counts[e.source][r] += 1;
        in_counts[e.target][r] += 1;
    }
    let dominant = |counts: &[usize]| -> usize {
        let best = counts.iter().copied().max().unwrap_or(0);
        if best == 0 {
            k
        } else {
            counts.iter().position(|&c| c == best).unwrap_or(k)
        }
    };
    let mut order: Vec<NodeId> = (0..g.n_nodes()).collect();
    order.sort_by_key(|&v| (dominant(&out_counts[v]), dominant(&in_counts[v]), v));
    let cells: Vec<(NodeId, NodeId, usize)> = g
        .edges()
        .iter()
        .zip(&rank_of_edge)
        .map(|(e, &r)| (e.source, e.target, r))
        .collect();
    adjacency(&order, &cells, title)
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let file: GenerateConfig = config::load(a.config.as_deref())?;
    let flags = GenerateConfig {
        n_blocks: a.n_blocks,
        nodes_per_block: a.nodes_per_block,
        p_self: a.p_self,
        p_con: a.p_con,
        p_dir: a.p_dir,
        structure: None,
        seed: a.seed,
    };
    let spec = file.resolve(flags);
    let s = run_generate(&spec)?;
    out_dir(&a.out)?;
    save_edge_list(&s.graph, &a.out.join("edges.tsv"))?;
    write(a.out.join("ground_truth.json"), &to_json(&s.ground_truth(spec.n_blocks))?)?;
    write(a.out.join("spec.json"), &to_json(&spec)?)?;
    log::info!("generated {} nodes, {} edges", s.graph.n_nodes(), s.graph.n_edges());
    Ok(())
}

pub fn decompose(a: DecomposeArgs) -> Result<()> {
    let file: RunConfig = config::load(a.input.config.as_deref())?;
    let g = load_graph(&a.input, &file)?;
    let n = pick("components", file.components, a.components, g.n_nodes().min(10));
    let format = pick("format", file.format, a.input.format, OutputFormat::Json);
    let op = build_modularity(&g, operator_mode(&a.input, &file, g.n_nodes()))?;
    let cfg = SvdConfig::new(n);
    let comps = if a.baseline {
        baseline_symmetrized(&op, &cfg)?
    } else {
        run_decompose(&op, &cfg)?
    };

    let out = &a.input.out;
    out_dir(out)?;
    let report = spectrum_report(&g, &comps);
    match format {
        OutputFormat::Json => write(out.join("spectrum.json"), &to_json(&report)?)?,
        OutputFormat::Csv => write(out.join("spectrum.csv"), &spectrum_csv(&report.components))?,
    }
    write(out.join("embedding.csv"), &components_csv(&g, &comps))?;
    let title = format!("first component, mu = {:.4}", comps[0].singular_value);
    write(out.join("embedding.svg"), &node_scatter(&g, &comps[0], |_| 0, &title))?;
    if a.export_operator {
        if g.n_nodes() > DEFAULT_DENSE_CAP {
            return Err(Error::Argument(format!(
                "refusing to export a dense {0}x{0} operator (cap {DEFAULT_DENSE_CAP})",
                g.n_nodes()
            )));
        }
        write(out.join("modularity.mtx"), &op.to_matrix_market())?;
    }
    Ok(())
}

pub fn detect(a: DetectArgs) -> Result<()> {
    let file: RunConfig = config::load(a.input.config.as_deref())?;
    let g = load_graph(&a.input, &file)?;
    let n = pick("components", file.components, a.components, 2);
    if file.clusters.is_none() && a.clusters.is_none() {
        return Err(Error::Argument("the number of clusters (--clusters/-k) is required".into()));
    }
    let k = pick("clusters", file.clusters, a.clusters, 0);
    let format = pick("format", file.format, a.input.format, OutputFormat::Json);

    let mut cfg = DetectConfig::new(n, k, pick("seed", file.seed, a.seed, 42));
    cfg.cluster.n_restarts = pick("restarts", file.restarts, a.restarts, cfg.cluster.n_restarts);
    cfg.mode = operator_mode(&a.input, &file, g.n_nodes());
    let det = run_detect(&g, &cfg)?;
    if det.clustering.realized < k {
        log::warn!("{k} clusters requested, {} non-empty", det.clustering.realized);
    }

    let out = &a.input.out;
    out_dir(out)?;
    let spectrum = spectrum_report(&g, &det.components);
    match format {
        OutputFormat::Json => {
            write(out.join("bicommunities.json"), &to_json(&DetectionReport::new(&g, &cfg, &det))?)?;
            write(out.join("spectrum.json"), &to_json(&spectrum)?)?;
        }
        OutputFormat::Csv => {
            write(out.join("edge_clusters.csv"), &edge_clusters_csv(&g, &det.bicommunities))?;
            write(out.join("spectrum.csv"), &spectrum_csv(&spectrum.components))?;
        }
    }
    let title = format!("{} bicommunities, N = {n}", det.bicommunities.len());
    write(out.join("adjacency.svg"), &adjacency_svg(&g, &det.bicommunities, &title))?;
    Ok(())
}

fn category_index(c: NodeCategory) -> usize {
    NodeCategory::ALL.iter().position(|&x| x == c).unwrap_or(0)
}

fn celegans_side_files(report: &AnalysisReport) -> (String, String) {
    let mut embedding = String::from("node,label,category,u_1,v_1\n");
    for r in &report.first_component {
        let _ = writeln!(embedding, "{},{},{},{},{}", r.node, r.label, r.category.as_str(), r.u1, r.v1);
    }
    let mut summary = String::from("rank,cluster_id,score,top,n_edges,n_sending,n_receiving");
    for side in ["sending", "receiving"] {
        for c in NodeCategory::ALL {
            let _ = write!(summary, ",{side}_{}", c.as_str());
        }
    }
    summary.push('\n');
    for b in &report.bicommunities {
        let _ = write!(
            summary,
            "{},{},{},{},{},{},{}",
            b.rank + 1,
            b.cluster_id,
            b.score,
            b.top,
            b.n_edges,
            b.sending.len(),
            b.receiving.len()
        );
        for comp in [&b.sending_composition, &b.receiving_composition] {
            for c in NodeCategory::ALL {
                let _ = write!(summary, ",{}", comp.get(&c).copied().unwrap_or(0));
            }
        }
        summary.push('\n');
    }
    (embedding, summary)
}

pub fn celegans(a: CelegansArgs) -> Result<()> {
    let file: RunConfig = config::load(a.config.as_deref())?;
    let d = CelegansConfig::default();
    let cfg = CelegansConfig {
        n_components: pick("components", file.components, a.components, d.n_components),
        n_clusters: pick("clusters", file.clusters, a.clusters, d.n_clusters),
        seed: pick("seed", file.seed, a.seed, d.seed),
        n_restarts: pick("restarts", file.restarts, a.restarts, d.n_restarts),
        spectrum_size: file.spectrum_size.unwrap_or(d.spectrum_size),
        top: pick("top", file.top, a.top, d.top),
        histogram_bins: pick("bins", file.bins, a.bins, d.histogram_bins),
        strip_self_loops: pick(
            "strip_self_loops",
            file.strip_self_loops,
            a.strip_self_loops.then_some(true),
            d.strip_self_loops,
        ),
    };
    let run = run_celegans(&a.edges, &a.metadata, &cfg)?;
    out_dir(&a.out)?;
    write(a.out.join("report.json"), &to_json(&run.report)?)?;
    write(a.out.join("spectrum.csv"), &spectrum_csv(&run.report.spectrum))?;
    let (embedding, summary) = celegans_side_files(&run.report);
    write(a.out.join("embedding.csv"), &embedding)?;
    write(a.out.join("bicommunities.csv"), &summary)?;
    write(a.out.join("edge_clusters.csv"), &edge_clusters_csv(&run.graph, &run.detection.bicommunities))?;
    let first = &run.detection.components[0];
    let title = format!("first component, mu = {:.4}", first.singular_value);
    let category: Vec<usize> = run.metadata.iter().map(|m| category_index(m.category)).collect();
    write(a.out.join("embedding.svg"), &node_scatter(&run.graph, first, |v| category[v], &title))?;
    let title = format!("{} bicommunities, N = {}", run.detection.bicommunities.len(), cfg.n_components);
    write(a.out.join("adjacency.svg"), &adjacency_svg(&run.graph, &run.detection.bicommunities, &title))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct BlockMatch {
    edge_block: usize,
    from_block: usize,
    to_block: usize,
    n_edges: usize,
    best_cluster: usize,
    sending_jaccard: f64,
    receiving_jaccard: f64,
}

#[derive(Debug, Serialize)]
struct EvalReport {
    schema_version: u32,
    n_edges: usize,
    truth_blocks: usize,
    detected_clusters: usize,
    edge_ari: f64,
    mean_node_jaccard: f64,
    blocks: Vec<BlockMatch>,
}

/// `(source, target) -> cluster id` from either detect output format.
fn load_detection(path: &Path) -> Result<BTreeMap<(NodeId, NodeId), usize>> {
    let mut map = BTreeMap::new();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, line) in text.lines().enumerate().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |i: usize| -> Result<usize> {
                cols.get(i)
                    .and_then(|c| c.trim().parse().ok())
                    .ok_or_else(|| Error::parse(path, idx + 1, format!("expected an integer in column {}", i + 1)))
            };
            map.insert((parse(0)?, parse(1)?), parse(5)?);
        }
    } else {
        let report = DetectionReport::load(path)?;
        for b in &report.bicommunities {
            for &[s, t] in &b.edges {
                map.insert((s, t), b.cluster_id);
            }
        }
    }
    Ok(map)
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let detected = load_detection(&a.detection)?;
    let truth = GroundTruth::load(&a.ground_truth)?;
    if detected.len() != truth.edges.len() {
        return Err(Error::Validation(format!(
            "{} has {} edges, {} has {}",
            a.detection.display(),
            detected.len(),
            a.ground_truth.display(),
            truth.edges.len()
        )));
    }
    let mut truth_labels = Vec::with_capacity(truth.edges.len());
    let mut found_labels = Vec::with_capacity(truth.edges.len());
    for &(s, t, block) in &truth.edges {
        let c = detected
            .get(&(s, t))
            .ok_or_else(|| Error::Validation(format!("edge {s} -> {t} missing from {}", a.detection.display())))?;
        truth_labels.push(block);
        found_labels.push(*c);
    }

    type Sides = (BTreeSet<NodeId>, BTreeSet<NodeId>, usize);
    let sides = |labels: &[usize]| -> BTreeMap<usize, Sides> {
        let mut m: BTreeMap<usize, Sides> = BTreeMap::new();
        for (&(s, t, _), &l) in truth.edges.iter().zip(labels) {
            let entry = m.entry(l).or_default();
            entry.0.insert(s);
            entry.1.insert(t);
            entry.2 += 1;
        }
        m
    };
    let truth_sides = sides(&truth_labels);
    let found_sides = sides(&found_labels);
    let blocks: Vec<BlockMatch> = truth_sides
        .iter()
        .map(|(&block, (ts, tr, count))| {
            let (best_cluster, sj, rj) = found_sides
                .iter()
                .map(|(&c, (fs, fr, _))| (c, jaccard(ts, fs), jaccard(tr, fr)))
                .fold((0, f64::NEG_INFINITY, 0.0), |best, cur| {
                    if cur.1 + cur.2 > best.1 + best.2 {
                        cur
                    } else {
                        best
                    }
                });
            BlockMatch {
                edge_block: block,
                from_block: block / truth.n_blocks,
                to_block: block % truth.n_blocks,
                n_edges: *count,
                best_cluster,
                sending_jaccard: sj,
                receiving_jaccard: rj,
            }
        })
        .collect();
    let mean = blocks.iter().map(|b| (b.sending_jaccard + b.receiving_jaccard) / 2.0).sum::<f64>() / blocks.len().max(1) as f64;
    let report = EvalReport {
        schema_version: 1,
        n_edges: truth.edges.len(),
        truth_blocks: truth_sides.len(),
        detected_clusters: found_sides.len(),
        edge_ari: adjusted_rand_index(&truth_labels, &found_labels),
        mean_node_jaccard: mean,
        blocks,
    };
    let json = to_json(&report)?;
    match a.out {
        Some(path) => write(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
