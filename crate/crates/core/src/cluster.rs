//! Riemannian fuzzy K-means.
//!
//! Memberships are eliminated in closed form, leaving
//! `J(C) = Σᵢ (Σⱼ δᵢⱼ^{2/(1−m)})^{1−m}`, a smooth function of the centers
//! alone. Its gradient with respect to center `j` is `Σᵢ uᵢⱼᵐ ∇δ²(xᵢ, cⱼ)`.

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifolds::Signature;
use crate::optim::{radan_step, RadanParams, RadanState};

#[derive(Debug, Clone, PartialEq)]
pub struct RfkConfig {
    pub n_clusters: usize,
    pub fuzziness: f64,
    pub radan: RadanParams,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl RfkConfig {
    pub fn new(n_clusters: usize, fuzziness: f64) -> Self {
        Self { n_clusters, fuzziness, radan: RadanParams::default(), max_iters: 2_000, tolerance: 1e-8, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fuzziness > 1.0) {
            return Err(Error::OutOfDomain { what: "fuzziness (must exceed 1)", value: self.fuzziness });
        }
        if self.n_clusters == 0 {
            return Err(Error::invalid("need at least one cluster"));
        }
        Ok(())
    }
}

fn check_fuzziness(m: f64) -> Result<()> {
    if !(m > 1.0) {
        return Err(Error::OutOfDomain { what: "fuzziness (must exceed 1)", value: m });
    }
    Ok(())
}

fn check_inputs(sig: &Signature, x: &ArrayView2<'_, f64>, centers: &ArrayView2<'_, f64>) -> Result<()> {
    for (what, a) in [("points", x), ("centers", centers)] {
        if a.ncols() != sig.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), found: a.ncols() });
        }
        for row in a.rows() {
            sig.check_point(&row.to_vec()).map_err(|e| Error::invalid(format!("{what}: {e}")))?;
        }
    }
    if centers.nrows() == 0 {
        return Err(Error::invalid("need at least one center"));
    }
    Ok(())
}

/// Squared geodesic distances, points × centers.
fn sq_dists(sig: &Signature, x: &ArrayView2<'_, f64>, centers: &ArrayView2<'_, f64>) -> Array2<f64> {
    let cs: Vec<Vec<f64>> = centers.rows().into_iter().map(|r| r.to_vec()).collect();
    let rows: Vec<Vec<f64>> = x
        .rows()
        .into_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|r| {
            let r = r.to_vec();
            cs.iter().map(|c| sig.dist_raw(&r, c).powi(2)).collect()
        })
        .collect();
    Array2::from_shape_fn((x.nrows(), cs.len()), |(i, j)| rows[i][j])
}

/// Memberships and per-point objective terms from one row of squared distances.
fn row_terms(d2: &[f64], m: f64) -> (Vec<f64>, f64) {
    if let Some(j) = d2.iter().position(|v| *v == 0.0) {
        let mut u = vec![0.0; d2.len()];
        u[j] = 1.0;
        return (u, 0.0);
    }
    // Log domain: the exponent 1/(1−m) is negative and large near m = 1.
    let e = 1.0 / (1.0 - m);
    let logs: Vec<f64> = d2.iter().map(|v| e * v.ln()).collect();
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = mx + logs.iter().map(|l| (l - mx).exp()).sum::<f64>().ln();
    let u = logs.iter().map(|l| (l - lse).exp()).collect();
    (u, ((1.0 - m) * lse).exp())
}

/// Closed-form memberships `uᵢⱼ = δᵢⱼ^{2/(1−m)} / Σₖ δᵢₖ^{2/(1−m)}`; a point
/// on a center gets the one-hot limit.
pub fn membership(sig: &Signature, x: ArrayView2<'_, f64>, centers: ArrayView2<'_, f64>, m: f64) -> Result<Array2<f64>> {
    check_fuzziness(m)?;
    check_inputs(sig, &x, &centers)?;
    let d2 = sq_dists(sig, &x, &centers);
    let mut u = Array2::zeros(d2.dim());
    for (i, row) in d2.rows().into_iter().enumerate() {
        let (ui, _) = row_terms(&row.to_vec(), m);
        u.row_mut(i).assign(&ndarray::ArrayView1::from(&ui));
    }
    Ok(u)
}

pub fn rfk_objective(sig: &Signature, x: ArrayView2<'_, f64>, centers: ArrayView2<'_, f64>, m: f64) -> Result<f64> {
    check_fuzziness(m)?;
    check_inputs(sig, &x, &centers)?;
    let d2 = sq_dists(sig, &x, &centers);
    Ok(d2.rows().into_iter().map(|r| row_terms(&r.to_vec(), m).1).sum())
}

/// `Σᵢⱼ uᵢⱼᵐ δ(xᵢ, cⱼ)²` for explicit memberships.
pub fn naive_objective(sig: &Signature, x: ArrayView2<'_, f64>, centers: ArrayView2<'_, f64>, u: ArrayView2<'_, f64>, m: f64) -> Result<f64> {
    check_inputs(sig, &x, &centers)?;
    if u.dim() != (x.nrows(), centers.nrows()) {
        return Err(Error::DimensionMismatch { expected: x.nrows() * centers.nrows(), found: u.len() });
    }
    let d2 = sq_dists(sig, &x, &centers);
    Ok(d2.iter().zip(u.iter()).map(|(d, w)| w.powf(m) * d).sum())
}

/// Riemannian gradient of [`rfk_objective`] for every center (rows).
pub fn objective_gradient(sig: &Signature, x: ArrayView2<'_, f64>, centers: ArrayView2<'_, f64>, m: f64) -> Result<Array2<f64>> {
    check_fuzziness(m)?;
    check_inputs(sig, &x, &centers)?;
    let d2 = sq_dists(sig, &x, &centers);
    let u: Vec<Vec<f64>> = d2.rows().into_iter().map(|r| row_terms(&r.to_vec(), m).0).collect();
    let xs: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let rows = (0..centers.nrows())
        .into_par_iter()
        .map(|j| {
            let c = centers.row(j).to_vec();
            let mut g = vec![0.0; c.len()];
            for (i, xi) in xs.iter().enumerate() {
                if d2[[i, j]] == 0.0 {
                    continue;
                }
                let w = u[i][j].powf(m);
                if w == 0.0 {
                    continue;
                }
                for (k, comp) in sig.components().iter().enumerate() {
                    let r = sig.range(k);
                    let e = comp.sq_dist_egrad(&c[r.clone()], &xi[r.clone()])?;
                    g[r].iter_mut().zip(e).for_each(|(a, b)| *a += w * b);
                }
            }
            Ok(sig.egrad_to_rgrad(&c, &g)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Array2::from_shape_fn((centers.nrows(), sig.ambient_dim()), |(j, k)| rows[j][k]))
}

/// Draws centers from the data, each with probability proportional to the
/// squared distance to the nearest center chosen so far.
pub fn kmeans_pp_init<R: Rng + ?Sized>(sig: &Signature, x: ArrayView2<'_, f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = x.nrows();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = rows.iter().map(|r| sig.dist_raw(r, &rows[chosen[0]]).powi(2)).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in nearest.iter().enumerate() {
                if t < *w {
                    pick = i;
                    break;
                }
                t -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, r) in rows.iter().enumerate() {
            nearest[i] = nearest[i].min(sig.dist_raw(r, &rows[next]).powi(2));
        }
    }
    Array2::from_shape_fn((k, sig.ambient_dim()), |(j, c)| rows[chosen[j]][c])
}

#[derive(Debug, Clone)]
pub struct RfkResult {
    pub centers: Array2<f64>,
    pub memberships: Array2<f64>,
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

impl RfkResult {
    /// Index of the largest membership per point.
    pub fn hard_labels(&self) -> Vec<usize> {
        self.memberships
            .rows()
            .into_iter()
            .map(|r| {
                let mut best = 0;
                for (j, v) in r.iter().enumerate() {
                    if *v > r[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }
}

/// Fits centers by Radan on the reduced objective.
pub fn fit_rfk(sig: &Signature, x: ArrayView2<'_, f64>, cfg: &RfkConfig) -> Result<RfkResult> {
    cfg.validate()?;
    let n = x.nrows();
    if n < cfg.n_clusters {
        return Err(Error::invalid(format!("{n} points cannot form {} clusters", cfg.n_clusters)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers = kmeans_pp_init(sig, x, cfg.n_clusters, &mut rng);
    let mut states = vec![RadanState::default(); cfg.n_clusters];
    let mut reinitialised = vec![false; cfg.n_clusters];
    let mut history = vec![rfk_objective(sig, x, centers.view(), cfg.fuzziness)?];
    let mut iterations = 0;
    let floor = 1.0 / cfg.n_clusters as f64;
    while iterations < cfg.max_iters {
        let u = membership(sig, x, centers.view(), cfg.fuzziness)?;
        for j in 0..cfg.n_clusters {
            let empty = u.column(j).iter().all(|v| *v < floor);
            if empty && !reinitialised[j] {
                reinitialised[j] = true;
                let i = rng.random_range(0..n);
                centers.row_mut(j).assign(&x.row(i));
                states[j] = RadanState::default();
            }
        }
        let g = objective_gradient(sig, x, centers.view(), cfg.fuzziness)?;
        for j in 0..cfg.n_clusters {
            let next = radan_step(sig, &mut states[j], &centers.row(j).to_vec(), &g.row(j).to_vec(), &cfg.radan)?;
            centers.row_mut(j).assign(&ndarray::ArrayView1::from(&next));
        }
        iterations += 1;
        let j = rfk_objective(sig, x, centers.view(), cfg.fuzziness)?;
        if !j.is_finite() {
            history.push(j);
            return Err(Error::Diverged { history });
        }
        let prev = *history.last().unwrap();
        history.push(j);
        if (prev - j).abs() < cfg.tolerance {
            break;
        }
    }
    let memberships = membership(sig, x, centers.view(), cfg.fuzziness)?;
    Ok(RfkResult { centers, memberships, objective_history: history, iterations })
}
