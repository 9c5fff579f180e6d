//! Coordinate learning: fit points on a product manifold to a target
//! distance matrix by Riemannian gradient descent on a distortion loss.

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::manifolds::{DistanceMatrix, Signature};
use crate::optim::{rsgd_step_raw, RsgdConfig};
use crate::sampling::WrappedNormal;

pub use crate::graph::graph_to_distance_matrix;

fn rows_checked(sig: &Signature, x: ArrayView2<'_, f64>, n: usize) -> Result<Array2<f64>> {
    if x.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.nrows() });
    }
    if x.ncols() != sig.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), found: x.ncols() });
    }
    let x = x.as_standard_layout().into_owned();
    for row in x.rows() {
        sig.check_point(row.as_slice().unwrap())?;
    }
    Ok(x)
}

/// `Σ_{i<j} |(δ(xᵢ,xⱼ)/Dᵢⱼ)² − 1|`, skipping pairs with `Dᵢⱼ = 0`.
pub fn distortion_loss(sig: &Signature, x: ArrayView2<'_, f64>, d: &DistanceMatrix) -> Result<f64> {
    let n = d.len();
    let x = rows_checked(sig, x, n)?;
    let mut any = false;
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let t = d.get(i, j);
            if t == 0.0 {
                continue;
            }
            any = true;
            let e = sig.dist_raw(x.row(i).as_slice().unwrap(), x.row(j).as_slice().unwrap());
            total += ((e / t).powi(2) - 1.0).abs();
        }
    }
    if !any && n > 1 {
        return Err(Error::InvalidDistanceMatrix("all off-diagonal target distances are zero".into()));
    }
    Ok(total)
}

/// `Σᵢⱼ |δ(xᵢ,xⱼ) − Dᵢⱼ| / n²`.
pub fn avg_distortion(sig: &Signature, x: ArrayView2<'_, f64>, d: &DistanceMatrix) -> Result<f64> {
    let n = d.len();
    let x = rows_checked(sig, x, n)?;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let e = sig.dist_raw(x.row(i).as_slice().unwrap(), x.row(j).as_slice().unwrap());
                total += (e - d.get(i, j)).abs();
            }
        }
    }
    Ok(total / (n * n) as f64)
}

/// Mean average precision of graph neighbourhoods recovered by embedded
/// nearest neighbours. Equal distances are ordered by node index.
pub fn mean_average_precision(sig: &Signature, x: ArrayView2<'_, f64>, graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    let x = rows_checked(sig, x, n)?;
    if let Some(u) = (0..n).find(|&u| graph.degree(u) == 0) {
        return Err(Error::invalid(format!("node {u} is isolated; mAP is undefined")));
    }
    let per_node: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let xa = x.row(a);
            let xa = xa.as_slice().unwrap();
            let mut order: Vec<(f64, usize)> = (0..n)
                .filter(|&b| b != a)
                .map(|b| (sig.dist_raw(xa, x.row(b).as_slice().unwrap()), b))
                .collect();
            order.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            let mut hits = 0usize;
            let mut sum = 0.0;
            for (rank, &(_, b)) in order.iter().enumerate() {
                if graph.has_edge(a, b) {
                    hits += 1;
                    sum += hits as f64 / (rank + 1) as f64;
                }
            }
            sum / graph.degree(a) as f64
        })
        .collect();
    Ok(per_node.iter().sum::<f64>() / n as f64)
}

#[derive(Debug, Clone)]
pub struct EmbedConfig {
    pub schedule: RsgdConfig,
    /// Learning rate for log-curvatures; zero keeps curvatures fixed.
    pub curvature_lr: f64,
    /// Rows held out from influencing the training rows.
    pub test_indices: Option<Vec<usize>>,
    /// Caps the geodesic length of each point's step. Pairs with small
    /// targets make the loss very stiff, and plain steps can blow up.
    pub max_step: Option<f64>,
}

impl EmbedConfig {
    pub fn new(lr: f64, epochs: usize) -> Self {
        Self { schedule: RsgdConfig::with_defaults(lr, epochs), curvature_lr: 0.0, test_indices: None, max_step: None }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = Some(max_step);
        self
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub x: Array2<f64>,
    pub signature: Signature,
    pub loss_history: Vec<f64>,
}

/// Per-pair derivative of the loss with respect to the squared distance.
fn pair_weight(e2: f64, t: f64) -> f64 {
    let r = e2 / (t * t) - 1.0;
    if r > 0.0 {
        1.0 / (t * t)
    } else if r < 0.0 {
        -1.0 / (t * t)
    } else {
        0.0
    }
}

/// Fits coordinates to `d` on `sig`.
///
/// Points start from `WN(origin, I/d)` with `d` the intrinsic dimension. With
/// `test_indices` set, a training row's gradient only sees training rows, and
/// curvature gradients only see training pairs; test rows see every pair.
pub fn fit_coordinates<R: Rng + ?Sized>(
    d: &DistanceMatrix,
    sig: &Signature,
    cfg: &EmbedConfig,
    rng: &mut R,
) -> Result<EmbeddingResult> {
    cfg.schedule.validate()?;
    if let Some(m) = cfg.max_step {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::invalid("max step must be positive and finite"));
        }
    }
    let n = d.len();
    if n < 2 {
        return Err(Error::invalid("need at least two points to embed"));
    }
    if !(0..n).any(|i| (i + 1..n).any(|j| d.get(i, j) > 0.0)) {
        return Err(Error::InvalidDistanceMatrix("all off-diagonal target distances are zero".into()));
    }
    let mut is_test = vec![false; n];
    if let Some(t) = &cfg.test_indices {
        for &i in t {
            if i >= n {
                return Err(Error::invalid(format!("test index {i} out of range 0..{n}")));
            }
            is_test[i] = true;
        }
    }
    let transductive = !is_test.iter().any(|&b| b);
    let nc = sig.len();
    let init_scale = 1.0 / sig.intrinsic_dim() as f64;
    let init = WrappedNormal::isotropic(sig, sig.origin(), &vec![init_scale; nc])?;
    let mut x = init.sample_n(n, rng);
    let mut sig = sig.clone();
    let mut log_k: Vec<f64> = sig.curvatures().iter().map(|k| k.abs().ln()).collect();
    let learn_k = cfg.curvature_lr != 0.0 && sig.components().iter().any(|c| c.is_curved());

    let mut history = Vec::with_capacity(cfg.schedule.total_epochs);
    for epoch in 0..cfg.schedule.total_epochs {
        let lr = cfg.schedule.lr_at(epoch);
        // Per row: ambient Euclidean gradient, loss share, and curvature gradient share.
        let rows: Vec<(Vec<f64>, f64, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = x.row(i);
                let xi = xi.as_slice().unwrap();
                let mut g = vec![0.0; xi.len()];
                let mut loss = 0.0;
                let mut kgrad = vec![0.0; nc];
                let mut sq = vec![0.0; nc];
                for j in 0..n {
                    let t = d.get(i, j);
                    if j == i || t == 0.0 {
                        continue;
                    }
                    if is_test[j] && !is_test[i] {
                        continue;
                    }
                    let xj = x.row(j);
                    let xj = xj.as_slice().unwrap();
                    sig.component_sq_dists_raw(xi, xj, &mut sq);
                    let e2: f64 = sq.iter().sum();
                    if j > i || (is_test[i] && !is_test[j]) {
                        // Each pair's loss is counted once: by its lower index, or by the test row for mixed pairs.
                        loss += (e2 / (t * t) - 1.0).abs();
                    }
                    let w = pair_weight(e2, t);
                    if w == 0.0 {
                        continue;
                    }
                    for (c, comp) in sig.components().iter().enumerate() {
                        let r = sig.range(c);
                        if let Ok(eg) = comp.sq_dist_egrad(&xi[r.clone()], &xj[r.clone()]) {
                            for (gk, v) in g[r].iter_mut().zip(eg) {
                                *gk += w * v;
                            }
                        }
                        if j > i && (transductive || (!is_test[i] && !is_test[j])) {
                            kgrad[c] -= w * sq[c];
                        }
                    }
                }
                (g, loss, kgrad)
            })
            .collect();
        let loss: f64 = rows.iter().map(|r| r.1).sum();
        history.push(loss);
        if !loss.is_finite() {
            return Err(Error::Diverged { history });
        }
        let mut next = Array2::zeros(x.dim());
        for (i, (g, _, _)) in rows.iter().enumerate() {
            let xi = x.row(i);
            let xi = xi.as_slice().unwrap();
            let p = match cfg.max_step {
                None => rsgd_step_raw(&sig, xi, g, lr),
                Some(cap) => {
                    let mut step: Vec<f64> = sig.egrad_to_rgrad_raw(xi, g).iter().map(|v| -lr * v).collect();
                    let len = sig.norm(&step);
                    if len > cap {
                        step.iter_mut().for_each(|v| *v *= cap / len);
                    }
                    sig.exp_raw(xi, &step)
                }
            };
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Diverged { history });
            }
            next.row_mut(i).assign(&Array1::from(p));
        }
        x = next;
        if learn_k && epoch >= cfg.schedule.burn_in_epochs {
            let mut kgrad = vec![0.0; nc];
            for r in &rows {
                for (a, b) in kgrad.iter_mut().zip(&r.2) {
                    *a += b;
                }
            }
            let mut new_k = sig.curvatures();
            for c in 0..nc {
                if !sig.components()[c].is_curved() {
                    continue;
                }
                let old = log_k[c];
                log_k[c] -= cfg.curvature_lr * kgrad[c];
                if !log_k[c].is_finite() {
                    return Err(Error::Diverged { history });
                }
                new_k[c] = new_k[c].signum() * log_k[c].exp();
                // Keep the configuration's shape: rescale so κ<x,x> = 1 still holds.
                let s = ((old - log_k[c]) / 2.0).exp();
                let r = sig.range(c);
                x.slice_mut(ndarray::s![.., r]).mapv_inplace(|v| v * s);
            }
            sig = sig.with_curvatures(&new_k)?;
        }
    }
    Ok(EmbeddingResult { x, signature: sig, loss_history: history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_embedding_has_zero_loss() {
        let sig = Signature::parse("E1").unwrap();
        let x = array![[0.0], [1.0], [3.0]];
        let d = DistanceMatrix::from_points(&sig, x.view()).unwrap();
        assert_eq!(distortion_loss(&sig, x.view(), &d).unwrap(), 0.0);
        assert_eq!(avg_distortion(&sig, x.view(), &d).unwrap(), 0.0);
    }

    #[test]
    fn single_pair_contributions() {
        let sig = Signature::parse("E1").unwrap();
        let x = array![[0.0], [2f64.sqrt()]];
        let d = DistanceMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((distortion_loss(&sig, x.view(), &d).unwrap() - 1.0).abs() < 1e-12);
        let y = array![[0.0], [1.5]];
        assert_eq!(avg_distortion(&sig, y.view(), &d).unwrap(), 0.25);
    }

    #[test]
    fn all_zero_targets_rejected() {
        let sig = Signature::parse("E1").unwrap();
        let d = DistanceMatrix::new(Array2::zeros((2, 2))).unwrap();
        assert!(distortion_loss(&sig, array![[0.0], [1.0]].view(), &d).is_err());
    }

    #[test]
    fn path_on_a_line_has_perfect_map() {
        let sig = Signature::parse("E2").unwrap();
        let g = Graph::from_unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let x = array![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert_eq!(mean_average_precision(&sig, x.view(), &g).unwrap(), 1.0);
        let iso = Graph::from_unweighted(3, &[(0, 1)]).unwrap();
        assert!(mean_average_precision(&sig, x.view(), &iso).is_err());
    }

    #[test]
    fn two_points_on_a_line() {
        let sig = Signature::parse("E1").unwrap();
        let d = DistanceMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let res = fit_coordinates(&d, &sig, &EmbedConfig::new(1e-4, 10_000), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let got = (res.x[[0, 0]] - res.x[[1, 0]]).abs();
        assert!((got - 1.0).abs() < 1e-3, "{got}");
    }
}
