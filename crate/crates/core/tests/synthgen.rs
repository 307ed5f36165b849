use bimod_core::synthgen::{generate, BlockCycleSpec, BlockStructure, GroundTruth};
use bimod_core::Error;
use statrs::distribution::{ContinuousCDF, Normal};

fn complete_structure(n_blocks: usize) -> BlockStructure {
    BlockStructure::Custom((0..n_blocks).flat_map(|a| (0..a).map(move |b| (a, b))).collect())
}

#[test]
fn within_block_density_within_three_sd() {
    for seed in 0..10 {
        let spec = BlockCycleSpec::four_block_cycle(seed);
        let s = generate(&spec).unwrap();
        let pairs = (50 * 49 / 2) as f64;
        let sd = (pairs * 0.3 * 0.7).sqrt();
        for b in 0..4 {
            let count = s.edge_block.iter().filter(|&&x| x == b * 4 + b).count() as f64;
            assert!((count - 0.3 * pairs).abs() <= 3.0 * sd, "seed {seed} block {b}: {count}");
        }
        let between = 2500.0_f64;
        let sd = (between * 0.3 * 0.7).sqrt();
        for (from, to) in spec.block_pairs() {
            let count = s.edge_block.iter().filter(|&&x| x == from * 4 + to).count() as f64;
            assert!((count - 0.3 * between).abs() <= 3.0 * sd);
        }
    }
}

#[test]
fn never_bidirectional() {
    for seed in 0..5 {
        let g = generate(&BlockCycleSpec::four_block_cycle(seed)).unwrap().graph;
        assert_eq!(g.reciprocated_edge_count(), 0);
        assert_eq!(g.self_loop_count(), 0);
    }
}

#[test]
fn same_seed_same_graph() {
    let a = generate(&BlockCycleSpec::four_block_cycle(9)).unwrap();
    let b = generate(&BlockCycleSpec::four_block_cycle(9)).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.edge_block, b.edge_block);
    let c = generate(&BlockCycleSpec::four_block_cycle(10)).unwrap();
    assert_ne!(a.graph, c.graph);
}

#[test]
fn adding_blocks_keeps_earlier_draws() {
    let small = BlockCycleSpec {
        n_blocks: 3,
        structure: BlockStructure::Custom(vec![(1, 0), (2, 1)]),
        ..BlockCycleSpec::four_block_cycle(5)
    };
    let large = BlockCycleSpec {
        n_blocks: 5,
        structure: BlockStructure::Custom(vec![(1, 0), (2, 1), (4, 3)]),
        ..small.clone()
    };
    let a = generate(&small).unwrap().graph;
    let b = generate(&large).unwrap().graph;
    let kept: Vec<_> = b.edges().iter().filter(|e| e.source < 150 && e.target < 150).copied().collect();
    assert_eq!(a.edges(), kept.as_slice());
}

#[test]
fn cycle_edges_point_to_previous_block() {
    let s = generate(&BlockCycleSpec::four_block_cycle(0)).unwrap();
    for e in s.graph.edges() {
        let (a, b) = (s.node_block[e.source], s.node_block[e.target]);
        assert!(a == b || b == (a + 3) % 4, "edge from block {a} to {b}");
    }
}

#[test]
fn uniform_density_when_probabilities_match() {
    // with every block pair connected, p_con = p_self should leave no trace in A + Aᵀ
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut significant = 0;
    let mut z_sum = 0.0;
    for seed in 0..20 {
        let spec = BlockCycleSpec {
            structure: complete_structure(4),
            ..BlockCycleSpec::four_block_cycle(seed)
        };
        let s = generate(&spec).unwrap();
        let within_pairs = 4.0 * 1225.0;
        let between_pairs = 6.0 * 2500.0;
        let within = s.graph.edges().iter().filter(|e| s.node_block[e.source] == s.node_block[e.target]).count() as f64;
        let between = s.graph.n_edges() as f64 - within;
        let (p1, p2) = (within / within_pairs, between / between_pairs);
        let pooled = (within + between) / (within_pairs + between_pairs);
        let se = (pooled * (1.0 - pooled) * (1.0 / within_pairs + 1.0 / between_pairs)).sqrt();
        let z = (p1 - p2) / se;
        z_sum += z;
        if 2.0 * (1.0 - normal.cdf(z.abs())) < 0.01 {
            significant += 1;
        }
    }
    // one rejection in 20 is expected under the null about 18% of the time; three would be 0.1%
    assert!(significant <= 2, "{significant} of 20 seeds rejected uniform density");
    let pooled_z = z_sum / 20f64.sqrt();
    assert!(2.0 * (1.0 - normal.cdf(pooled_z.abs())) > 0.01, "pooled z {pooled_z}");
}

#[test]
fn two_block_tournaments() {
    let spec = BlockCycleSpec {
        n_blocks: 2,
        nodes_per_block: 10,
        p_self: 1.0,
        p_con: 0.0,
        ..BlockCycleSpec::four_block_cycle(1)
    };
    let s = generate(&spec).unwrap();
    assert_eq!(s.graph.n_edges(), 90);
    assert_eq!(s.graph.reciprocated_edge_count(), 0);
}

#[test]
fn spec_validation() {
    let bad = BlockCycleSpec {
        p_self: 1.5,
        ..BlockCycleSpec::four_block_cycle(0)
    };
    assert!(matches!(generate(&bad), Err(Error::Validation(_))));
    let bad = BlockCycleSpec {
        structure: BlockStructure::Custom(vec![(0, 7)]),
        ..BlockCycleSpec::four_block_cycle(0)
    };
    assert!(matches!(generate(&bad), Err(Error::Validation(_))));
}

#[test]
fn spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("spec.toml");
    std::fs::write(
        &toml_path,
        "n_blocks = 3\nnodes_per_block = 20\np_self = 0.4\np_con = 0.2\nseed = 11\nstructure = { custom = [[1, 0], [2, 0]] }\n",
    )
    .unwrap();
    let spec = BlockCycleSpec::from_file(&toml_path).unwrap();
    assert_eq!(spec.p_dir, 0.5);
    assert_eq!(spec.structure, BlockStructure::Custom(vec![(1, 0), (2, 0)]));

    let json_path = dir.path().join("spec.json");
    std::fs::write(&json_path, serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(BlockCycleSpec::from_file(&json_path).unwrap(), spec);

    std::fs::write(&toml_path, "n_blocks = 3\nnodes_per_block = 2\np_self = 0.4\np_con = 0.2\ncolour = 1\n").unwrap();
    assert!(BlockCycleSpec::from_file(&toml_path).is_err());
}

#[test]
fn ground_truth_roundtrip() {
    let s = generate(&BlockCycleSpec::four_block_cycle(2)).unwrap();
    let truth = s.ground_truth(4);
    assert_eq!(truth.edges.len(), s.graph.n_edges());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ground_truth.json");
    std::fs::write(&path, serde_json::to_string(&truth).unwrap()).unwrap();
    assert_eq!(GroundTruth::load(&path).unwrap(), truth);
}
