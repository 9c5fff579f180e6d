//! Wrapped normal distributions and synthetic Gaussian mixtures.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::manifolds::{ComponentManifold, Kind, Signature};

/// Smallest eigenvalue accepted as "PSD" after rounding.
const PSD_TOL: f64 = 1e-10;

/// Wrapped normal on a product manifold: one covariance per component, each
/// of size `dim × dim` in the intrinsic tangent coordinates at the origin.
#[derive(Debug, Clone)]
pub struct WrappedNormal {
    sig: Signature,
    mean: Vec<f64>,
    covs: Vec<DMatrix<f64>>,
    roots: Vec<DMatrix<f64>>,
}

fn to_dmatrix(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn psd_sqrt(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let root = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

impl WrappedNormal {
    pub fn new(sig: &Signature, mean: Vec<f64>, covs: Vec<Array2<f64>>) -> Result<Self> {
        sig.check_point(&mean)?;
        if covs.len() != sig.len() {
            return Err(Error::DimensionMismatch { expected: sig.len(), found: covs.len() });
        }
        let mut dm = Vec::with_capacity(covs.len());
        let mut roots = Vec::with_capacity(covs.len());
        for (c, cov) in sig.components().iter().zip(&covs) {
            if cov.dim() != (c.dim(), c.dim()) {
                return Err(Error::DimensionMismatch { expected: c.dim(), found: cov.nrows() });
            }
            if cov.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("covariance has non-finite entries"));
            }
            let m = to_dmatrix(cov);
            roots.push(psd_sqrt(&m)?);
            dm.push(m);
        }
        Ok(Self { sig: sig.clone(), mean, covs: dm, roots })
    }

    /// `WN(origin, s·I)` with a per-component scale.
    pub fn isotropic(sig: &Signature, mean: Vec<f64>, scales: &[f64]) -> Result<Self> {
        let covs = sig
            .components()
            .iter()
            .zip(scales)
            .map(|(c, s)| Array2::eye(c.dim()) * *s)
            .collect();
        Self::new(sig, mean, covs)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Tangent vector at the origin: each curved block gets a leading zero.
    fn lift(c: &ComponentManifold, v: &[f64]) -> Vec<f64> {
        if c.is_curved() {
            std::iter::once(0.0).chain(v.iter().copied()).collect()
        } else {
            v.to_vec()
        }
    }

    /// Draws one point: `v' ~ N(0, Σ)`, lift to `T_{μ₀}`, transport to `μ`, exponentiate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.sig.ambient_dim());
        for (i, c) in self.sig.components().iter().enumerate() {
            let root = &self.roots[i];
            let eps = DVector::from_fn(c.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let vp = root * eps;
            let v = Self::lift(c, vp.as_slice());
            let mu = &self.mean[self.sig.range(i)];
            let o = c.origin();
            let u = c.transport_raw(&o, mu, &v).expect("the origin is never antipodal to a valid mean");
            out.extend(c.exp_raw(mu, &u));
        }
        out
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Array2<f64> {
        let d = self.sig.ambient_dim();
        let mut out = Array2::zeros((n, d));
        for i in 0..n {
            let p = self.sample(rng);
            out.row_mut(i).assign(&Array1::from(p));
        }
        out
    }

    /// Log-density with respect to the Riemannian volume.
    ///
    /// Inverts the sampling chain and subtracts, per curved component,
    /// `(d-1)·ln(sinh(√|κ| r)/(√|κ| r))` (`sin` for spheres) where `r = ‖u‖`.
    pub fn log_likelihood(&self, z: &[f64]) -> Result<f64> {
        self.sig.check_point(z)?;
        let mut total = 0.0;
        for (i, c) in self.sig.components().iter().enumerate() {
            let r = self.sig.range(i);
            let mu = &self.mean[r.clone()];
            let u = c.log_raw(mu, &z[r])?;
            let o = c.origin();
            let v = c.transport_raw(mu, &o, &u)?;
            let vp = if c.is_curved() { &v[1..] } else { &v[..] };
            total += gaussian_log_density(&self.covs[i], vp)?;
            let t = c.scale() * c.norm(&u);
            if c.is_curved() && t > 1e-12 {
                let ratio = match c.kind() {
                    Kind::Hyperbolic => t.sinh() / t,
                    _ => t.sin() / t,
                };
                total -= (c.dim() as f64 - 1.0) * ratio.ln();
            }
        }
        Ok(total)
    }
}

/// `log N(v; 0, Σ)` via Cholesky.
fn gaussian_log_density(cov: &DMatrix<f64>, v: &[f64]) -> Result<f64> {
    let d = v.len();
    let chol = cov
        .clone()
        .cholesky()
        .ok_or(Error::Singular("log-likelihood needs a positive-definite covariance"))?;
    let x = DVector::from_column_slice(v);
    let sol = chol.l().solve_lower_triangular(&x).ok_or(Error::Singular("triangular solve failed"))?;
    let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    Ok(-0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + sol.norm_squared()))
}

/// Bartlett-decomposition draw from `Wishart(scale·I, df)` of size `d × d`.
pub fn wishart_isotropic<R: Rng + ?Sized>(d: usize, scale: f64, df: usize, rng: &mut R) -> Array2<f64> {
    let mut a = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new((df - i) as f64).expect("df exceeds dimension");
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let w = &a * a.transpose() * scale;
    Array2::from_shape_fn((d, d), |(i, j)| w[(i, j)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Debug, Clone)]
pub struct MixtureConfig {
    pub n_samples: usize,
    pub n_clusters: usize,
    pub n_classes: usize,
    pub variance_scale: f64,
    pub task: Task,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self { n_samples: 1000, n_clusters: 2, n_classes: 2, variance_scale: 1.0, task: Task::Classification }
    }
}

#[derive(Debug, Clone)]
pub struct LabeledDataset {
    /// One ambient point per row.
    pub x: Array2<f64>,
    /// Class ids `1..=n_classes` (as floats) or regression targets in `[0, 1]`.
    pub y: Vec<f64>,
    pub cluster_ids: Vec<usize>,
    pub means: Array2<f64>,
    pub cluster_probs: Vec<f64>,
}

impl LabeledDataset {
    /// Labels as integers, for classification datasets.
    pub fn class_labels(&self) -> Vec<usize> {
        self.y.iter().map(|v| *v as usize).collect()
    }
}

/// Draw from the categorical distribution `p` by inverting its CDF with one uniform.
pub fn categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Samples a labeled Gaussian mixture on `sig`.
pub fn gaussian_mixture<R: Rng + ?Sized>(sig: &Signature, cfg: &MixtureConfig, rng: &mut R) -> Result<LabeledDataset> {
    if cfg.n_samples == 0 || cfg.n_clusters == 0 || cfg.n_classes == 0 {
        return Err(Error::invalid("mixture sizes must be positive"));
    }
    if cfg.n_classes > cfg.n_clusters {
        return Err(Error::invalid(format!(
            "n_classes ({}) exceeds n_clusters ({})",
            cfg.n_classes, cfg.n_clusters
        )));
    }
    if !(cfg.variance_scale > 0.0) || !cfg.variance_scale.is_finite() {
        return Err(Error::invalid("variance scale must be positive"));
    }
    let raw: Vec<f64> = (0..cfg.n_clusters).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let ids: Vec<usize> = (0..cfg.n_samples).map(|_| categorical(&probs, rng)).collect();

    let curv_scale = |c: &ComponentManifold| if c.is_curved() { c.curvature().abs() } else { 1.0 };
    let mean_scales: Vec<f64> = sig.components().iter().map(curv_scale).collect();
    let mean_dist = WrappedNormal::isotropic(sig, sig.origin(), &mean_scales)?;
    let means = mean_dist.sample_n(cfg.n_clusters, rng);

    let mut clusters = Vec::with_capacity(cfg.n_clusters);
    for k in 0..cfg.n_clusters {
        let covs = sig
            .components()
            .iter()
            .map(|c| {
                let d = c.dim();
                wishart_isotropic(d, cfg.variance_scale * curv_scale(c).sqrt(), d.max(2), rng)
            })
            .collect();
        clusters.push(WrappedNormal::new(sig, means.row(k).to_vec(), covs)?);
    }
    let mut x = Array2::zeros((cfg.n_samples, sig.ambient_dim()));
    for (i, &c) in ids.iter().enumerate() {
        x.row_mut(i).assign(&Array1::from(clusters[c].sample(rng)));
    }

    let y = match cfg.task {
        Task::Classification => {
            let mut map: Vec<usize> = (1..=cfg.n_classes).collect();
            for _ in cfg.n_classes..cfg.n_clusters {
                map.push(rng.random_range(1..=cfg.n_classes));
            }
            ids.iter().map(|&c| map[c] as f64).collect()
        }
        Task::Regression => assign_regression_labels(&x, &ids, cfg.n_clusters, cfg.variance_scale, rng),
    };
    Ok(LabeledDataset { x, y, cluster_ids: ids, means, cluster_probs: probs })
}

/// Per-cluster linear labels `s·x + b + ε`, min-max scaled to `[0, 1]`.
///
/// Slopes have variance 2, intercepts variance 20, and the noise has
/// standard deviation `noise_std`. Constant raw labels map to 0.5.
pub fn assign_regression_labels<R: Rng + ?Sized>(
    x: &Array2<f64>,
    cluster_ids: &[usize],
    n_clusters: usize,
    noise_std: f64,
    rng: &mut R,
) -> Vec<f64> {
    let d = x.ncols();
    let slope = Normal::new(0.0, 2f64.sqrt()).unwrap();
    let intercept = Normal::new(0.0, 20f64.sqrt()).unwrap();
    let params: Vec<(Vec<f64>, f64)> = (0..n_clusters)
        .map(|_| ((0..d).map(|_| slope.sample(rng)).collect(), intercept.sample(rng)))
        .collect();
    let raw: Vec<f64> = cluster_ids
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let (s, b) = &params[c];
            let lin: f64 = s.iter().zip(x.row(i)).map(|(a, v)| a * v).sum();
            let noise = if noise_std > 0.0 { noise_std * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
            lin + b + noise
        })
        .collect();
    min_max_scale(&raw)
}

pub fn min_max_scale(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; v.len()];
    }
    v.iter().map(|y| (y - lo) / (hi - lo)).collect()
}
