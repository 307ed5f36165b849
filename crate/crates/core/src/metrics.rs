//! Partition agreement scores and the rank test used by the benchmarks.

use std::collections::{BTreeSet, HashMap};

use statrs::distribution::{ContinuousCDF, Normal};

use crate::numeric::pairwise_sum;

fn choose2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Two trivial partitions that coincide (both one cluster, or both all
/// singletons) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must have equal length");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let sum_comb = |counts: Vec<usize>| {
        let mut terms: Vec<f64> = counts.into_iter().map(|c| choose2(c as f64)).collect();
        terms.sort_by(f64::total_cmp);
        pairwise_sum(&terms)
    };
    let index = sum_comb(table.into_values().collect());
    let sum_a = sum_comb(rows.into_values().collect());
    let sum_b = sum_comb(cols.into_values().collect());
    let expected = sum_a * sum_b / choose2(n as f64);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Mean silhouette coefficient of the rows of `data` (row-major, `dim`
/// columns) under `labels`, Euclidean distance. Points alone in their
/// cluster contribute 0.
pub fn silhouette(data: &[f64], dim: usize, labels: &[usize]) -> f64 {
    let n = labels.len();
    assert_eq!(data.len(), n * dim);
    let clusters: BTreeSet<usize> = labels.iter().copied().collect();
    if clusters.len() < 2 {
        return 0.0;
    }
    let index: HashMap<usize, usize> = clusters.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut sizes = vec![0usize; clusters.len()];
    for l in labels {
        sizes[index[l]] += 1;
    }
    let row = |i: usize| &data[i * dim..(i + 1) * dim];
    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let own = index[&labels[i]];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut totals = vec![0.0; clusters.len()];
            for j in 0..n {
                if j != i {
                    let d: f64 = row(i).iter().zip(row(j)).map(|(x, y)| (x - y) * (x - y)).sum();
                    totals[index[&labels[j]]] += d.sqrt();
                }
            }
            let a = totals[own] / (sizes[own] - 1) as f64;
            let b = (0..clusters.len())
                .filter(|&c| c != own)
                .map(|c| totals[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            if a.max(b) == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .collect();
    pairwise_sum(&scores) / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value, normal approximation with tie and continuity
    /// corrections.
    pub p_value: f64,
}

/// Two-sided Mann–Whitney U test.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> MannWhitney {
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let mut all: Vec<(f64, usize)> = x.iter().map(|&v| (v, 0)).chain(y.iter().map(|&v| (v, 1))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum_x = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_x += all[i..=j].iter().filter(|e| e.1 == 0).count() as f64 * avg_rank;
        i = j + 1;
    }
    let u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let total = n1 + n2;
    let var = n1 * n2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return MannWhitney { u, z: 0.0, p_value: 1.0 };
    }
    let diff = (u - mean).abs() - 0.5;
    let z = diff.max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p_value = (2.0 * (1.0 - normal.cdf(z))).min(1.0);
    MannWhitney { u, z, p_value }
}
