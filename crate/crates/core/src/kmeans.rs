//! Seeded k-means with k-means++ initialization and restarts.
//!
//! Restart `r` draws from a ChaCha8 stream `r` of the base seed, so each
//! restart is reproducible on its own and the restarts can run on any number
//! of threads. The best run is the lowest inertia, lowest restart index on
//! ties.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 2,
            n_restarts: 50,
            seed: 42,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    /// Row-major, `k × dim`.
    pub centroids: Vec<f64>,
    pub inertia: f64,
    pub restart: usize,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Clusters the rows of `data` (row-major, `dim` columns).
pub fn kmeans(data: &[f64], dim: usize, cfg: &KMeansConfig) -> Result<KMeansResult> {
    if dim == 0 || data.is_empty() {
        return Err(Error::Argument("k-means needs a non-empty data matrix".into()));
    }
    if !data.len().is_multiple_of(dim) {
        return Err(Error::Argument(format!(
            "data length {} is not a multiple of dimension {dim}",
            data.len()
        )));
    }
    let n = data.len() / dim;
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::Argument(format!("k = {} must be in 1..={n}", cfg.k)));
    }
    let restarts = cfg.n_restarts.max(1);
    let runs: Vec<KMeansResult> = (0..restarts)
        .into_par_iter()
        .map(|r| single_run(data, dim, n, cfg, r))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");
    Ok(best)
}

fn single_run(data: &[f64], dim: usize, n: usize, cfg: &KMeansConfig, restart: usize) -> KMeansResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut centroids = plus_plus_init(data, dim, n, cfg.k, &mut rng);

    let mut assignment = vec![usize::MAX; n];
    let mut iterations = 0;
    for _ in 0..cfg.max_iter.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, point) in data.chunks_exact(dim).enumerate() {
            let (c, _) = nearest(point, &centroids, dim);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; cfg.k * dim];
        let mut counts = vec![0usize; cfg.k];
        for (point, &c) in data.chunks_exact(dim).zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(point) {
                *s += x;
            }
        }
        for c in 0..cfg.k {
            // empty clusters keep their centroid
            if counts[c] > 0 {
                for d in 0..dim {
                    centroids[c * dim + d] = sums[c * dim + d] / counts[c] as f64;
                }
            }
        }
    }

    let dists: Vec<f64> = data
        .chunks_exact(dim)
        .zip(&assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c * dim..(c + 1) * dim]))
        .collect();
    KMeansResult {
        assignment,
        centroids,
        inertia: pairwise_sum(&dists),
        restart,
        iterations,
    }
}

/// k-means++ seeding: first center uniform, then proportional to the squared
/// distance to the nearest chosen center.
fn plus_plus_init(data: &[f64], dim: usize, n: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let row = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut centroids = Vec::with_capacity(k * dim);
    centroids.extend_from_slice(row(rng.random_range(0..n)));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(row(i), &centroids[..dim])).collect();
    for _ in 1..k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point already sits on a center
            Err(_) => rng.random_range(0..n),
        };
        let start = centroids.len();
        centroids.extend_from_slice(row(next));
        for (i, d) in d2.iter_mut().enumerate() {
            let nd = sq_dist(row(i), &centroids[start..start + dim]);
            if nd < *d {
                *d = nd;
            }
        }
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> Vec<f64> {
        let mut data = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)] {
            for i in 0..20 {
                let t = i as f64 * 0.3;
                data.extend_from_slice(&[cx + t.sin() * 0.5, cy + t.cos() * 0.5]);
            }
        }
        data
    }

    #[test]
    fn separates_blobs() {
        let data = blobs();
        let res = kmeans(&data, 2, &KMeansConfig { k: 3, ..Default::default() }).unwrap();
        for b in 0..3 {
            let first = res.assignment[b * 20];
            assert!(res.assignment[b * 20..(b + 1) * 20].iter().all(|&c| c == first));
        }
        let mut labels: Vec<usize> = (0..3).map(|b| res.assignment[b * 20]).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn k_one_is_single_cluster() {
        let res = kmeans(&blobs(), 2, &KMeansConfig { k: 1, ..Default::default() }).unwrap();
        assert!(res.assignment.iter().all(|&c| c == 0));
    }

    #[test]
    fn identical_rows_share_a_cluster() {
        let data = [1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 5.0, 1.0, 1.0];
        let res = kmeans(&data, 2, &KMeansConfig { k: 2, ..Default::default() }).unwrap();
        assert_eq!(res.assignment[0], res.assignment[1]);
        assert_eq!(res.assignment[0], res.assignment[4]);
        assert_eq!(res.assignment[2], res.assignment[3]);
        assert_ne!(res.assignment[0], res.assignment[2]);
    }

    #[test]
    fn all_points_equal_does_not_panic() {
        let data = vec![2.0; 10];
        let res = kmeans(&data, 2, &KMeansConfig { k: 3, ..Default::default() }).unwrap();
        assert_eq!(res.inertia, 0.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let data = blobs();
        let cfg = KMeansConfig { k: 4, n_restarts: 7, seed: 9, max_iter: 100 };
        assert_eq!(kmeans(&data, 2, &cfg).unwrap(), kmeans(&data, 2, &cfg).unwrap());
    }

    #[test]
    fn argument_errors() {
        assert!(kmeans(&[], 2, &KMeansConfig::default()).is_err());
        assert!(kmeans(&[1.0, 2.0], 2, &KMeansConfig { k: 2, ..Default::default() }).is_err());
        assert!(kmeans(&[1.0, 2.0, 3.0], 2, &KMeansConfig { k: 1, ..Default::default() }).is_err());
    }
}
