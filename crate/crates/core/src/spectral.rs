//! Singular value decomposition of the modularity operator.
//!
//! Each singular triple `(μ_k, u_k, v_k)` maximizes the relaxed bimodularity
//! `uᵀ B v / 2m` subject to unit norms and orthogonality to the previous
//! triples, with value `μ_k / 2m`.
//!
//! Dense operators go through a Golub–Kahan SVD. Implicit operators use
//! randomized subspace iteration with a fixed seed: a Gaussian test block is
//! pushed through alternating `B` / `Bᵀ` products and re-orthonormalized until
//! the top-k residual `max_k ‖B v_k - μ_k u_k‖ / μ_1` drops below `tol`.
//!
//! Components are oriented so the largest-magnitude entry of `u_k` is
//! positive (lowest index on ties). Within a degenerate singular value the
//! individual vectors are solver-dependent; only their span is meaningful.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::modularity::{ModularityOperator, OperatorMode};
use crate::numeric::{dot, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assortativity {
    Assortative,
    Dissortative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralComponent {
    /// Zero-based rank by decreasing singular value.
    pub index: usize,
    pub singular_value: f64,
    /// Left (sending) singular vector.
    pub u: Vec<f64>,
    /// Right (receiving) singular vector.
    pub v: Vec<f64>,
    /// `sign(uᵀv)`, with zero mapped to `+1`.
    pub assort_sign: i8,
}

impl SpectralComponent {
    fn new(index: usize, singular_value: f64, mut u: Vec<f64>, mut v: Vec<f64>) -> Self {
        orient(&mut u, &mut v);
        let assort_sign = if dot(&u, &v) >= 0.0 { 1 } else { -1 };
        SpectralComponent {
            index,
            singular_value,
            u,
            v,
            assort_sign,
        }
    }

    /// `assort_sign · μ`, used for signed spectrum plots.
    pub fn signed_value(&self) -> f64 {
        f64::from(self.assort_sign) * self.singular_value
    }

    /// Relaxed bimodularity of this component, `μ / 2m`.
    pub fn bimodularity(&self, total_weight: f64) -> f64 {
        self.singular_value / (2.0 * total_weight)
    }
}

pub fn classify_component(c: &SpectralComponent) -> Assortativity {
    if c.assort_sign >= 0 {
        Assortativity::Assortative
    } else {
        Assortativity::Dissortative
    }
}

fn orient(u: &mut [f64], v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in u.iter().enumerate() {
        if x.abs() > u[best].abs() {
            best = i;
        }
    }
    if u.get(best).is_some_and(|&x| x < 0.0) {
        u.iter_mut().for_each(|x| *x = -*x);
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvdConfig {
    pub n_components: usize,
    /// Relative residual target of the iterative solver. The dense solver
    /// always runs to machine precision, which is never looser than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the randomized test block (implicit mode only).
    pub seed: u64,
    pub oversampling: usize,
}

impl SvdConfig {
    pub fn new(n_components: usize) -> Self {
        SvdConfig {
            n_components,
            ..Default::default()
        }
    }
}

impl Default for SvdConfig {
    fn default() -> Self {
        SvdConfig {
            n_components: 10,
            tol: 1e-10,
            max_iter: 1000,
            seed: 0x5eed_b1d0,
            oversampling: 10,
        }
    }
}

/// Products with a square linear operator, one column block at a time.
trait BlockOperator {
    fn n(&self) -> usize;
    fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
    fn tr_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
}

impl BlockOperator for ModularityOperator {
    fn n(&self) -> usize {
        ModularityOperator::n(self)
    }

    fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.apply_block(x)
    }

    fn tr_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.apply_transpose_block(x)
    }
}

/// `(B + Bᵀ) / 2` without materializing it.
struct Symmetrized<'a>(&'a ModularityOperator);

impl BlockOperator for Symmetrized<'_> {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        (self.0.apply_block(x) + self.0.apply_transpose_block(x)) * 0.5
    }

    fn tr_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.mul(x)
    }
}

fn check_config(n: usize, cfg: &SvdConfig) -> Result<()> {
    if cfg.n_components > n {
        return Err(Error::Argument(format!(
            "requested {} components from a {n}-node operator",
            cfg.n_components
        )));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    Ok(())
}

/// Leading `cfg.n_components` singular triples of `B`, by decreasing `μ`.
pub fn decompose(op: &ModularityOperator, cfg: &SvdConfig) -> Result<Vec<SpectralComponent>> {
    check_config(op.n(), cfg)?;
    let (u, s, v) = match op.dense() {
        Some(b) => dense_svd(b.clone(), cfg)?,
        None => randomized_svd(op, cfg)?,
    };
    Ok(collect_components(&u, &s, &v, cfg.n_components))
}

/// Eigen-decomposition of the symmetrized operator `(B + Bᵀ)/2`, the
/// direction-blind baseline.
///
/// Returned in component form: `μ = |λ|`, `u` the eigenvector and
/// `v = sign(λ) u`, so `signed_value()` recovers `λ` and a symmetric `B`
/// gives the same components as [`decompose`].
pub fn baseline_symmetrized(op: &ModularityOperator, cfg: &SvdConfig) -> Result<Vec<SpectralComponent>> {
    check_config(op.n(), cfg)?;
    let k = cfg.n_components;
    let pairs: Vec<(f64, Vec<f64>)> = match op.dense() {
        Some(b) => {
            let sym = (b + b.transpose()) * 0.5;
            let n = sym.nrows();
            let eig = SymmetricEigen::try_new(sym, f64::EPSILON.min(cfg.tol), cfg.max_iter.saturating_mul(n.max(1)))
                .ok_or(Error::NonConvergence {
                    iterations: cfg.max_iter,
                    residual: f64::NAN,
                })?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                eig.eigenvalues[b]
                    .abs()
                    .total_cmp(&eig.eigenvalues[a].abs())
                    .then(a.cmp(&b))
            });
            order
                .into_iter()
                .take(k)
                .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
                .collect()
        }
        None => {
            let (u, s, v) = randomized_svd(&Symmetrized(op), cfg)?;
            (0..k)
                .map(|i| {
                    let ui: Vec<f64> = u.column(i).iter().copied().collect();
                    let vi: Vec<f64> = v.column(i).iter().copied().collect();
                    let sign = if dot(&ui, &vi) >= 0.0 { 1.0 } else { -1.0 };
                    (sign * s[i], ui)
                })
                .collect()
        }
    };
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(index, (lambda, x))| {
            let sign = if lambda >= 0.0 { 1.0 } else { -1.0 };
            let v = x.iter().map(|&e| sign * e).collect();
            SpectralComponent::new(index, lambda.abs(), x, v)
        })
        .collect())
}

fn collect_components(u: &DMatrix<f64>, s: &[f64], v: &DMatrix<f64>, k: usize) -> Vec<SpectralComponent> {
    (0..k)
        .map(|i| {
            SpectralComponent::new(
                i,
                s[i],
                u.column(i).iter().copied().collect(),
                v.column(i).iter().copied().collect(),
            )
        })
        .collect()
}

type Triples = (DMatrix<f64>, Vec<f64>, DMatrix<f64>);

/// Singular triples sorted by decreasing value, ties by original position.
fn sorted_svd(m: DMatrix<f64>, eps: f64, max_niter: usize) -> Option<Triples> {
    let svd = m.try_svd_unordered(true, true, eps, max_niter)?;
    let u = svd.u?;
    let vt = svd.v_t?;
    let values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v_sorted = DMatrix::from_fn(vt.ncols(), order.len(), |r, c| vt[(order[c], r)]);
    let s_sorted = order.iter().map(|&i| values[i]).collect();
    Some((u_sorted, s_sorted, v_sorted))
}

fn dense_svd(b: DMatrix<f64>, cfg: &SvdConfig) -> Result<Triples> {
    let n = b.nrows();
    sorted_svd(b, f64::EPSILON.min(cfg.tol), cfg.max_iter.saturating_mul(n.max(1))).ok_or(
        Error::NonConvergence {
            iterations: cfg.max_iter,
            residual: f64::NAN,
        },
    )
}

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

fn randomized_svd(op: &dyn BlockOperator, cfg: &SvdConfig) -> Result<Triples> {
    let n = op.n();
    let k = cfg.n_components;
    let l = (k + cfg.oversampling).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let omega = DMatrix::from_fn(n, l, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = orthonormal_basis(op.mul(&omega));

    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter.max(1) {
        // Qᵀ B, stored transposed
        let bt_q = op.tr_mul(&q);
        let (us, s, v) = sorted_svd(bt_q.transpose(), f64::EPSILON, 0).ok_or(Error::NonConvergence {
            iterations: cfg.max_iter,
            residual,
        })?;
        let u = &q * us;
        let vk = v.columns(0, k).into_owned();
        let bv = op.mul(&vk);
        let scale = if s.first().is_some_and(|&s0| s0 > 0.0) { s[0] } else { 1.0 };
        residual = (0..k)
            .map(|i| norm((bv.column(i) - u.column(i) * s[i]).as_slice()) / scale)
            .fold(0.0, f64::max);
        if residual <= cfg.tol {
            return Ok((u, s, v));
        }
        q = orthonormal_basis(op.mul(&orthonormal_basis(bt_q)));
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Convenience: dense/implicit choice from a mode flag, then [`decompose`].
pub fn decompose_graph(g: &DirectedGraph, mode: OperatorMode, cfg: &SvdConfig) -> Result<(ModularityOperator, Vec<SpectralComponent>)> {
    let op = crate::modularity::build_modularity(g, mode)?;
    let comps = decompose(&op, cfg)?;
    Ok((op, comps))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumEntry {
    pub index: usize,
    pub singular_value: f64,
    pub signed_value: f64,
    pub assortativity: Assortativity,
    pub bimodularity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub total_weight: f64,
    pub components: Vec<SpectrumEntry>,
}

pub fn spectrum_report(g: &DirectedGraph, components: &[SpectralComponent]) -> SpectrumReport {
    SpectrumReport {
        schema_version: 1,
        n_nodes: g.n_nodes(),
        n_edges: g.n_edges(),
        total_weight: g.total_weight(),
        components: components
            .iter()
            .map(|c| SpectrumEntry {
                index: c.index,
                singular_value: c.singular_value,
                signed_value: c.signed_value(),
                assortativity: classify_component(c),
                bimodularity: c.bimodularity(g.total_weight()),
            })
            .collect(),
    }
}

/// One row per node: `node,label,u_1..u_N,v_1..v_N`.
pub fn components_csv(g: &DirectedGraph, components: &[SpectralComponent]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("node,label");
    for side in ["u", "v"] {
        for c in components {
            let _ = write!(out, ",{side}_{}", c.index + 1);
        }
    }
    out.push('\n');
    for node in 0..g.n_nodes() {
        let _ = write!(out, "{node},{}", g.label(node));
        for c in components {
            let _ = write!(out, ",{}", c.u[node]);
        }
        for c in components {
            let _ = write!(out, ",{}", c.v[node]);
        }
        out.push('\n');
    }
    out
}

/// `U diag(μ) Vᵀ` from a component list.
pub fn reconstruct(components: &[SpectralComponent], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    for c in components {
        let u = DVector::from_column_slice(&c.u);
        let v = DVector::from_column_slice(&c.v);
        out += u * v.transpose() * c.singular_value;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modularity::build_modularity;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::from_edges(n, edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap()
    }

    #[test]
    fn three_cycle_singular_values() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        for mode in [OperatorMode::Dense, OperatorMode::Implicit] {
            let op = build_modularity(&g, mode).unwrap();
            let mut cfg = SvdConfig::new(3);
            cfg.oversampling = 0;
            let comps = decompose(&op, &cfg).unwrap();
            let s: Vec<f64> = comps.iter().map(|c| c.singular_value).collect();
            assert!((s[0] - 1.0).abs() < 1e-10, "{mode:?} {s:?}");
            assert!((s[1] - 1.0).abs() < 1e-10, "{mode:?} {s:?}");
            assert!(s[2].abs() < 1e-10, "{mode:?} {s:?}");
        }
    }

    #[test]
    fn single_edge_all_zero() {
        let op = build_modularity(&graph(2, &[(0, 1)]), OperatorMode::Dense).unwrap();
        let comps = decompose(&op, &SvdConfig::new(2)).unwrap();
        assert!(comps.iter().all(|c| c.singular_value == 0.0));
    }

    #[test]
    fn too_many_components_is_argument_error() {
        let op = build_modularity(&graph(2, &[(0, 1)]), OperatorMode::Dense).unwrap();
        assert!(matches!(decompose(&op, &SvdConfig::new(3)), Err(Error::Argument(_))));
        let mut cfg = SvdConfig::new(1);
        cfg.tol = 0.0;
        assert!(matches!(decompose(&op, &cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn orientation_rule() {
        let c = SpectralComponent::new(0, 1.0, vec![0.1, -0.9, 0.9], vec![1.0, 0.0, 0.0]);
        // tie between |-0.9| and |0.9| goes to index 1, which is negative
        assert_eq!(c.u, vec![-0.1, 0.9, -0.9]);
        assert_eq!(c.v, vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn orthogonal_vectors_are_assortative() {
        let c = SpectralComponent::new(0, 2.0, vec![1.0, 0.0], vec![0.0, 1.0]);
        assert_eq!(classify_component(&c), Assortativity::Assortative);
        assert_eq!(c.signed_value(), 2.0);
        let d = SpectralComponent::new(0, 2.0, vec![1.0, 0.0], vec![-1.0, 0.0]);
        assert_eq!(classify_component(&d), Assortativity::Dissortative);
        assert_eq!(d.signed_value(), -2.0);
    }

    #[test]
    fn three_cycle_baseline_eigenvalues() {
        // (B + Bᵀ)/2 = (C + Cᵀ)/2 - J/3 has eigenvalues 0 (on 1) and
        // cos(2π/3) = -1/2 (twice, on the complement).
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let op = build_modularity(&g, OperatorMode::Dense).unwrap();
        let comps = baseline_symmetrized(&op, &SvdConfig::new(3)).unwrap();
        let signed: Vec<f64> = comps.iter().map(|c| c.signed_value()).collect();
        assert!((signed[0] + 0.5).abs() < 1e-12);
        assert!((signed[1] + 0.5).abs() < 1e-12);
        assert!(signed[2].abs() < 1e-12);
        for c in &comps[..2] {
            assert_eq!(classify_component(c), Assortativity::Dissortative);
        }
    }

    #[test]
    fn csv_and_report_shapes() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let op = build_modularity(&g, OperatorMode::Dense).unwrap();
        let comps = decompose(&op, &SvdConfig::new(2)).unwrap();
        let csv = components_csv(&g, &comps);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("node,label,u_1,u_2,v_1,v_2"));
        assert_eq!(lines.count(), 3);
        let report = spectrum_report(&g, &comps);
        assert_eq!(report.components.len(), 2);
        assert!((report.components[0].bimodularity - 1.0 / 6.0).abs() < 1e-10);
    }
}
