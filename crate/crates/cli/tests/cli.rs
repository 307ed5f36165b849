use std::path::Path;
use std::process::{Command, Output};

fn bimod(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bimod"))
        .args(args)
        .current_dir(dir)
        .env_remove("BIMOD_THREADS")
        .output()
        .expect("run bimod")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_detect_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&bimod(&["generate", "--seed", "3", "--out", "g"], d));
    assert!(d.join("g/edges.tsv").exists());
    let truth = read_json(&d.join("g/ground_truth.json"));
    assert_eq!(truth["node_block"].as_array().unwrap().len(), 200);

    ok(&bimod(&["detect", "g/edges.tsv", "-n", "2", "-k", "8", "--seed", "1", "--out", "det"], d));
    let report = read_json(&d.join("det/bicommunities.json"));
    assert_eq!(report["bicommunities"].as_array().unwrap().len(), 8);
    assert!(d.join("det/adjacency.svg").exists());
    assert!(d.join("det/spectrum.json").exists());

    let out = bimod(&["eval", "det/bicommunities.json", "g/ground_truth.json"], d);
    ok(&out);
    let metrics: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(metrics["edge_ari"].as_f64().unwrap() >= 0.95);
    assert!(metrics["mean_node_jaccard"].as_f64().unwrap() > 0.9);

    ok(&bimod(&["detect", "g/edges.tsv", "-k", "8", "--format", "csv", "--out", "csv"], d));
    assert!(d.join("csv/edge_clusters.csv").exists());
    assert!(!d.join("csv/bicommunities.json").exists());
    let out = bimod(&["eval", "csv/edge_clusters.csv", "g/ground_truth.json", "--out", "m.json"], d);
    ok(&out);
    assert!(read_json(&d.join("m.json"))["edge_ari"].as_f64().unwrap() >= 0.95);
}

#[test]
fn single_cluster_covers_all_edges() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&bimod(&["generate", "--n-blocks", "2", "--nodes-per-block", "15", "--out", "."], d));
    ok(&bimod(&["detect", "edges.tsv", "-k", "1", "--out", "."], d));
    let report = read_json(&d.join("bicommunities.json"));
    let bcs = report["bicommunities"].as_array().unwrap();
    assert_eq!(bcs.len(), 1);
    assert_eq!(bcs[0]["edges"].as_array().unwrap().len(), report["n_edges"].as_u64().unwrap() as usize);
}

#[test]
fn decompose_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cycle.tsv"), "0\t1\n1\t2\n2\t0\n").unwrap();
    ok(&bimod(&["decompose", "cycle.tsv", "-n", "3", "--export-operator", "--out", "."], d));
    let spectrum = read_json(&d.join("spectrum.json"));
    let mu: Vec<f64> = spectrum["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["singular_value"].as_f64().unwrap())
        .collect();
    assert!((mu[0] - 1.0).abs() < 1e-10 && (mu[1] - 1.0).abs() < 1e-10 && mu[2].abs() < 1e-10);
    let csv = std::fs::read_to_string(d.join("embedding.csv")).unwrap();
    assert!(csv.starts_with("node,label,u_1,u_2,u_3,v_1,v_2,v_3\n"));
    assert!(std::fs::read_to_string(d.join("embedding.svg")).unwrap().contains("<circle"));
    assert!(std::fs::read_to_string(d.join("modularity.mtx")).unwrap().starts_with("%%MatrixMarket matrix array real general"));

    ok(&bimod(&["decompose", "cycle.tsv", "--implicit", "--baseline", "--format", "csv", "--out", "b"], d));
    assert!(std::fs::read_to_string(d.join("b/spectrum.csv")).unwrap().starts_with("index,singular_value"));
}

#[test]
fn missing_file_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = bimod(&["detect", "does/not/exist.tsv", "-k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does/not/exist.tsv"));
}

#[test]
fn argument_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("g.tsv"), "0 1\n1 2\n2 0\n").unwrap();
    assert_eq!(bimod(&["detect", "g.tsv", "-k", "9"], d).status.code(), Some(2));
    assert_eq!(bimod(&["detect", "g.tsv"], d).status.code(), Some(2));
    assert_eq!(bimod(&["decompose", "g.tsv", "-n", "4"], d).status.code(), Some(2));
    assert_eq!(bimod(&["decompose", "g.tsv", "--dense", "--implicit"], d).status.code(), Some(2));
    assert_eq!(bimod(&["frobnicate"], d).status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.tsv"), "0 1\n1 x y\n").unwrap();
    let out = bimod(&["detect", "bad.tsv", "-k", "1"], d);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.tsv:2"));
    std::fs::write(d.join("neg.tsv"), "0 1 -1\n").unwrap();
    assert_eq!(bimod(&["detect", "neg.tsv", "-k", "1"], d).status.code(), Some(3));
}

#[test]
fn config_file_wins_over_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("gen.toml"), "n_blocks = 2\nnodes_per_block = 10\nseed = 5\n").unwrap();
    let out = bimod(&["generate", "--config", "gen.toml", "--seed", "6", "--out", "."], d);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let spec = read_json(&d.join("spec.json"));
    assert_eq!(spec["seed"], 5);
    assert_eq!(spec["n_blocks"], 2);

    std::fs::write(d.join("run.json"), r#"{"clusters": 2, "seed": 3}"#).unwrap();
    ok(&bimod(&["detect", "edges.tsv", "--config", "run.json", "-k", "4", "--out", "."], d));
    let report = read_json(&d.join("bicommunities.json"));
    assert_eq!((report["requested_clusters"].as_u64(), report["seed"].as_u64()), (Some(2), Some(3)));

    std::fs::write(d.join("bad.toml"), "clusterz = 2\n").unwrap();
    assert_eq!(bimod(&["detect", "edges.tsv", "--config", "bad.toml"], d).status.code(), Some(3));
}

#[test]
fn detect_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&bimod(&["generate", "--seed", "8", "--out", "."], d));
    for out in ["a", "b"] {
        ok(&bimod(&["detect", "edges.tsv", "-k", "8", "--seed", "5", "--out", out], d));
    }
    for f in ["bicommunities.json", "spectrum.json", "adjacency.svg"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn celegans_fixture() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let edges = fixtures.join("worm_edges.tsv");
    let meta = fixtures.join("worm_meta.csv");
    let args = |out: &str| {
        vec![
            "celegans".to_string(),
            edges.to_string_lossy().into_owned(),
            meta.to_string_lossy().into_owned(),
            "--out".into(),
            out.into(),
        ]
    };
    for out in ["a", "b"] {
        let a = args(out);
        ok(&bimod(&a.iter().map(String::as_str).collect::<Vec<_>>(), d));
    }
    for f in ["report.json", "embedding.csv", "bicommunities.csv", "spectrum.csv", "edge_clusters.csv", "embedding.svg", "adjacency.svg"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    let report = read_json(&d.join("a/report.json"));
    assert_eq!(report["graph"]["n_nodes"], 34);
    let top = report["bicommunities"].as_array().unwrap().iter().filter(|b| b["top"] == true).count();
    assert_eq!(top, 3);
}
