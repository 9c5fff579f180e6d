//! κ-GCN family in stereographic coordinates, Fermi-Dirac link decoding and
//! the product-space kernel perceptron.
//!
//! Setting `Â = I` turns a GCN into an MLP, and dropping the hidden layers
//! leaves a multinomial logistic regression on stereographic hyperplanes.
//! Training uses central finite differences over the (small) parameter
//! vector; biases and hyperplane offsets live on the manifold and take
//! Riemannian steps.

use std::str::FromStr;

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifolds::{Kind, Signature};
use crate::stereographic::{product_logits, StereoProduct};

/// Upper bound on trainable parameters for finite-difference training.
pub const MAX_PARAMS: usize = 5_000;

/// `Â = D̃^{-1/2} (A + Aᵀ + I) D̃^{-1/2}`.
pub fn get_a_hat(a: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("adjacency entries must be finite and nonnegative"));
    }
    let mut t = &a + &a.t();
    t.diag_mut().mapv_inplace(|v| v + 1.0);
    let d: Vec<f64> = t.rows().into_iter().map(|r| 1.0 / r.sum().sqrt()).collect();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| d[i] * t[[i, j]] * d[j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Identity => v,
            Activation::Relu => v.max(0.0),
            Activation::Tanh => v.tanh(),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "none" => Ok(Self::Identity),
            "relu" => Ok(Self::Relu),
            "tanh" => Ok(Self::Tanh),
            _ => Err(Error::invalid(format!("unknown activation `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Classify,
    Regress,
    Link,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cls" | "classify" => Ok(Self::Classify),
            "reg" | "regress" => Ok(Self::Regress),
            "link" => Ok(Self::Link),
            _ => Err(Error::invalid(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaGcnConfig {
    /// Shared by every layer; hidden weights are square per component.
    pub signature: Signature,
    pub hidden_layers: usize,
    /// Number of classes; forced to 1 for regression and unused for links.
    pub n_outputs: usize,
    pub use_bias: bool,
    pub activation: Activation,
    pub mode: Mode,
}

/// Fermi-Dirac decoder parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiDiracParams {
    pub r: f64,
    pub t: f64,
}

impl Default for FermiDiracParams {
    fn default() -> Self {
        Self { r: 2.0, t: 1.0 }
    }
}

impl FermiDiracParams {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !(r >= 0.0) {
            return Err(Error::OutOfDomain { what: "Fermi-Dirac parameters (r ≥ 0, t > 0)", value: if t > 0.0 { r } else { t } });
        }
        Ok(Self { r, t })
    }

    /// `1 / (exp((δ² − r)/t) + 1)`.
    pub fn prob(&self, dist: f64) -> f64 {
        let z = (dist * dist - self.r) / self.t;
        if z > 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (z.exp() + 1.0)
        }
    }
}

pub fn fermi_dirac_link_prob(product: &StereoProduct, xi: &[f64], xj: &[f64], params: &FermiDiracParams) -> Result<f64> {
    Ok(params.prob(product.dist(xi, xj)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnLayer {
    /// One square matrix per component.
    pub weights: Vec<Array2<f64>>,
    pub bias: Option<Vec<f64>>,
}

/// Stereographic hyperplane logits: row `k` of `a` is the normal and row `k`
/// of `p` the offset point of class `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitHead {
    pub a: Array2<f64>,
    pub p: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaGcn {
    pub config: KappaGcnConfig,
    pub layers: Vec<GcnLayer>,
    pub head: LogitHead,
    pub fermi_dirac: FermiDiracParams,
    product: StereoProduct,
}

/// Training targets for the three modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Class indices in `0..n_outputs`.
    Classes(Vec<usize>),
    Values(Vec<f64>),
    /// Node pairs with 1/0 edge labels.
    Links { pairs: Vec<(usize, usize)>, labels: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub fd_step: f64,
}

impl TrainConfig {
    pub fn new(epochs: usize, lr: f64) -> Self {
        Self { epochs, lr, fd_step: 1e-5 }
    }
}

/// One matrix per component, acting on the rows of `h`.
fn block_right_matmul(product: &StereoProduct, h: ArrayView2<'_, f64>, w: &[Array2<f64>]) -> Result<Array2<f64>> {
    let mut out = Array2::zeros(h.dim());
    for (c, k) in product.curvatures.iter().enumerate() {
        let r = product.range(c);
        let block = crate::stereographic::right_matmul(h.slice(s![.., r.clone()]), w[c].view(), *k)?;
        out.slice_mut(s![.., r]).assign(&block);
    }
    Ok(out)
}

/// Nonzero entries of `Â` by row, so the output aggregation skips zeros.
struct SparseRows(Vec<Vec<(usize, f64)>>);

impl SparseRows {
    fn new(a: ArrayView2<'_, f64>) -> Self {
        Self(
            a.rows()
                .into_iter()
                .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect())
                .collect(),
        )
    }

    fn apply(&self, l: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.0.len(), l.ncols()));
        for (i, row) in self.0.iter().enumerate() {
            for &(j, w) in row {
                out.row_mut(i).scaled_add(w, &l.row(j));
            }
        }
        out
    }
}

fn softmax_row(row: ArrayView1<'_, f64>) -> Array1<f64> {
    let m = row.fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let e = row.mapv(|v| (v - m).exp());
    let s = e.sum();
    e / s
}

impl KappaGcn {
    pub fn new<R: Rng + ?Sized>(config: KappaGcnConfig, rng: &mut R) -> Result<Self> {
        let product = StereoProduct::new(&config.signature);
        let d = product.dim();
        let k = match config.mode {
            Mode::Classify => {
                if config.n_outputs == 0 {
                    return Err(Error::invalid("classification needs at least one class"));
                }
                config.n_outputs
            }
            Mode::Regress | Mode::Link => 1,
        };
        let mut layers = Vec::with_capacity(config.hidden_layers);
        for _ in 0..config.hidden_layers {
            let weights = config
                .signature
                .components()
                .iter()
                .map(|c| {
                    let n = Normal::new(0.0, 1.0 / (c.dim() as f64).sqrt()).expect("finite");
                    Array2::from_shape_fn((c.dim(), c.dim()), |_| n.sample(rng))
                })
                .collect();
            layers.push(GcnLayer { weights, bias: config.use_bias.then(|| vec![0.0; d]) });
        }
        let small = Normal::new(0.0, 0.01).expect("finite");
        let head = LogitHead { a: Array2::from_shape_fn((k, d), |_| small.sample(rng)), p: Array2::zeros((k, d)) };
        let model = Self { config, layers, head, fermi_dirac: FermiDiracParams::default(), product };
        if model.param_count() > MAX_PARAMS {
            return Err(Error::invalid(format!("{} parameters exceed the limit of {MAX_PARAMS}", model.param_count())));
        }
        Ok(model)
    }

    pub fn product(&self) -> &StereoProduct {
        &self.product
    }

    fn check_input(&self, x: &ArrayView2<'_, f64>, a_hat: &ArrayView2<'_, f64>) -> Result<()> {
        if x.ncols() != self.product.dim() {
            return Err(Error::DimensionMismatch { expected: self.product.dim(), found: x.ncols() });
        }
        if a_hat.dim() != (x.nrows(), x.nrows()) {
            return Err(Error::DimensionMismatch { expected: x.nrows(), found: a_hat.nrows() });
        }
        Ok(())
    }

    /// One hidden layer: `σ^{⊗κ}(Â ⊠_κ (H ⊗_κ W) ⊕_κ b)`.
    pub fn layer_forward(&self, layer: &GcnLayer, h: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let hw = block_right_matmul(&self.product, h, &layer.weights)?;
        let mut agg = self.product.left_matmul(a_hat, hw.view())?;
        let act = self.config.activation;
        for mut row in agg.rows_mut() {
            let mut v = row.to_vec();
            if let Some(b) = &layer.bias {
                v = self.product.mobius_add(&v, b)?;
            }
            if act != Activation::Identity {
                let t: Vec<f64> = self.product.log0(&v).into_iter().map(|u| act.apply(u)).collect();
                v = self.product.exp0(&t);
            }
            row.assign(&ArrayView1::from(&v));
        }
        Ok(agg)
    }

    /// Output of the hidden stack.
    pub fn embed(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_input(&x, &a_hat)?;
        let mut h = x.to_owned();
        for layer in &self.layers {
            h = self.layer_forward(layer, h.view(), a_hat)?;
        }
        Ok(h)
    }

    /// `Â · logits(H)`, one column per output.
    pub fn logits(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.logits_with(x, a_hat, &SparseRows::new(a_hat))
    }

    fn logits_with(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, sparse: &SparseRows) -> Result<Array2<f64>> {
        let h = self.embed(x, a_hat)?;
        let k = self.head.a.nrows();
        let mut l = Array2::zeros((h.nrows(), k));
        for (i, row) in h.rows().into_iter().enumerate() {
            let row = row.to_vec();
            for c in 0..k {
                let a = self.head.a.row(c).to_vec();
                let p = self.head.p.row(c).to_vec();
                l[[i, c]] = product_logits(&self.product, &row, &a, &p)?;
            }
        }
        Ok(sparse.apply(&l))
    }

    pub fn forward_classify(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let l = self.logits(x, a_hat)?;
        let mut out = Array2::zeros(l.dim());
        for (i, row) in l.rows().into_iter().enumerate() {
            out.row_mut(i).assign(&softmax_row(row));
        }
        Ok(out)
    }

    pub fn forward_regress(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(self.logits(x, a_hat)?.column(0).to_vec())
    }

    pub fn link_probs(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
        let h = self.embed(x, a_hat)?;
        pairs
            .iter()
            .map(|&(i, j)| {
                if i >= h.nrows() || j >= h.nrows() {
                    return Err(Error::invalid(format!("pair ({i},{j}) out of range")));
                }
                fermi_dirac_link_prob(&self.product, &h.row(i).to_vec(), &h.row(j).to_vec(), &self.fermi_dirac)
            })
            .collect()
    }

    /// Most probable class per row.
    pub fn predict_classes(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        let p = self.forward_classify(x, a_hat)?;
        Ok(p.rows()
            .into_iter()
            .map(|r| {
                let mut best = 0;
                for (i, v) in r.iter().enumerate() {
                    if *v > r[best] {
                        best = i;
                    }
                }
                best
            })
            .collect())
    }

    /// Mean cross-entropy, squared error or binary cross-entropy.
    pub fn loss(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, targets: &Targets) -> Result<f64> {
        self.loss_with(x, a_hat, &SparseRows::new(a_hat), targets)
    }

    fn loss_with(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, sparse: &SparseRows, targets: &Targets) -> Result<f64> {
        const EPS: f64 = 1e-15;
        match (self.config.mode, targets) {
            (Mode::Classify, Targets::Classes(y)) => {
                let l = self.logits_with(x, a_hat, sparse)?;
                check_len(y.len(), l.nrows())?;
                let mut total = 0.0;
                for (row, &c) in l.rows().into_iter().zip(y) {
                    if c >= l.ncols() {
                        return Err(Error::invalid(format!("class {c} out of range")));
                    }
                    let m = row.fold(f64::NEG_INFINITY, |a, b| a.max(*b));
                    let lse = m + row.mapv(|v| (v - m).exp()).sum().ln();
                    total += lse - row[c];
                }
                Ok(total / y.len() as f64)
            }
            (Mode::Regress, Targets::Values(y)) => {
                let p = self.logits_with(x, a_hat, sparse)?.column(0).to_vec();
                check_len(y.len(), p.len())?;
                Ok(p.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64)
            }
            (Mode::Link, Targets::Links { pairs, labels }) => {
                check_len(pairs.len(), labels.len())?;
                let p = self.link_probs(x, a_hat, pairs)?;
                Ok(-p
                    .iter()
                    .zip(labels)
                    .map(|(q, y)| y * q.max(EPS).ln() + (1.0 - y) * (1.0 - q).max(EPS).ln())
                    .sum::<f64>()
                    / labels.len().max(1) as f64)
            }
            _ => Err(Error::invalid("targets do not match the model mode")),
        }
    }

    pub fn param_count(&self) -> usize {
        self.params().0.len()
    }

    /// Flat parameter vector and the start offsets of manifold-valued blocks
    /// (each one full stereographic point).
    fn params(&self) -> (Vec<f64>, Vec<usize>) {
        let mut v = Vec::new();
        let mut points = Vec::new();
        for layer in &self.layers {
            for w in &layer.weights {
                v.extend(w.iter());
            }
            if let Some(b) = &layer.bias {
                points.push(v.len());
                v.extend(b);
            }
        }
        v.extend(self.head.a.iter());
        for row in self.head.p.rows() {
            points.push(v.len());
            v.extend(row.iter());
        }
        (v, points)
    }

    fn set_params(&mut self, v: &[f64]) {
        let mut it = v.iter().copied();
        for layer in &mut self.layers {
            for w in &mut layer.weights {
                w.iter_mut().for_each(|x| *x = it.next().unwrap());
            }
            if let Some(b) = &mut layer.bias {
                b.iter_mut().for_each(|x| *x = it.next().unwrap());
            }
        }
        self.head.a.iter_mut().for_each(|x| *x = it.next().unwrap());
        self.head.p.iter_mut().for_each(|x| *x = it.next().unwrap());
    }

    /// Central-difference gradient of [`Self::loss`].
    pub fn loss_gradient(&self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, targets: &Targets, h: f64) -> Result<Vec<f64>> {
        self.loss_gradient_with(x, a_hat, &SparseRows::new(a_hat), targets, h)
    }

    fn loss_gradient_with(
        &self,
        x: ArrayView2<'_, f64>,
        a_hat: ArrayView2<'_, f64>,
        sparse: &SparseRows,
        targets: &Targets,
        h: f64,
    ) -> Result<Vec<f64>> {
        let (p0, _) = self.params();
        (0..p0.len())
            .into_par_iter()
            .map(|i| {
                let mut m = self.clone();
                let mut p = p0.clone();
                p[i] = p0[i] + h;
                m.set_params(&p);
                let up = m.loss_with(x, a_hat, sparse, targets)?;
                p[i] = p0[i] - h;
                m.set_params(&p);
                let down = m.loss_with(x, a_hat, sparse, targets)?;
                Ok((up - down) / (2.0 * h))
            })
            .collect()
    }

    /// Full-batch gradient descent; returns the loss before every step.
    pub fn train(&mut self, x: ArrayView2<'_, f64>, a_hat: ArrayView2<'_, f64>, targets: &Targets, cfg: &TrainConfig) -> Result<Vec<f64>> {
        if !(cfg.lr > 0.0) || !(cfg.fd_step > 0.0) {
            return Err(Error::invalid("learning rate and finite-difference step must be positive"));
        }
        let d = self.product.dim();
        let sparse = SparseRows::new(a_hat);
        let mut history = Vec::with_capacity(cfg.epochs);
        for _ in 0..cfg.epochs {
            let l = self.loss_with(x, a_hat, &sparse, targets)?;
            if !l.is_finite() {
                history.push(l);
                return Err(Error::Diverged { history });
            }
            history.push(l);
            let g = self.loss_gradient_with(x, a_hat, &sparse, targets, cfg.fd_step)?;
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Diverged { history });
            }
            let (mut p, points) = self.params();
            let mut on_manifold = vec![false; p.len()];
            for &start in &points {
                on_manifold[start..start + d].iter_mut().for_each(|f| *f = true);
                // Riemannian step: the metric is λ_x² times Euclidean per component.
                let pt = p[start..start + d].to_vec();
                let lambdas = self.product.conformal_factors(&pt);
                let step: Vec<f64> = (0..d).map(|j| -cfg.lr * g[start + j] / (lambdas[j] * lambdas[j])).collect();
                let next = self.product.exp(&pt, &step)?;
                p[start..start + d].copy_from_slice(&next);
            }
            for (i, flag) in on_manifold.iter().enumerate() {
                if !flag {
                    p[i] -= cfg.lr * g[i];
                }
            }
            self.set_params(&p);
        }
        Ok(history)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Kernel perceptron state.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPerceptronState {
    pub beta: Vec<f64>,
    /// Max Euclidean norm of each hyperbolic factor over the training set.
    pub radii: Vec<f64>,
    pub alpha_s: f64,
    pub alpha_h: f64,
    /// Contribution of the constant kernel term, `Σ β`.
    pub bias: f64,
    pub epochs_run: usize,
    pub converged: bool,
}

/// Largest tolerated arcsine argument overshoot.
const ASIN_TOL: f64 = 1e-9;

fn checked_asin(v: f64) -> Result<f64> {
    if v.abs() > 1.0 + ASIN_TOL {
        return Err(Error::OutOfDomain { what: "kernel arcsine argument", value: v });
    }
    Ok(v.clamp(-1.0, 1.0).asin())
}

/// Max Euclidean norm of each hyperbolic component over the rows of `x`.
pub fn hyperbolic_radii(sig: &Signature, x: ArrayView2<'_, f64>) -> Vec<f64> {
    sig.components()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind() == Kind::Hyperbolic)
        .map(|(i, _)| {
            let r = sig.range(i);
            x.rows()
                .into_iter()
                .map(|row| row.slice(s![r.clone()]).dot(&row.slice(s![r.clone()])).sqrt())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Kernel rows `K(y_i, x_j)` for ambient points.
pub fn perceptron_kernel(
    sig: &Signature,
    y: ArrayView2<'_, f64>,
    x: ArrayView2<'_, f64>,
    radii: &[f64],
    alpha_s: f64,
    alpha_h: f64,
) -> Result<Array2<f64>> {
    if y.ncols() != sig.ambient_dim() || x.ncols() != sig.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), found: y.ncols().min(x.ncols()) });
    }
    let n_h = sig.components().iter().filter(|c| c.kind() == Kind::Hyperbolic).count();
    if radii.len() != n_h || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::invalid("need one positive radius per hyperbolic component"));
    }
    let mut k = Array2::from_elem((y.nrows(), x.nrows()), 1.0);
    let mut h_idx = 0;
    for (c, comp) in sig.components().iter().enumerate() {
        let r = sig.range(c);
        let g = y.slice(s![.., r.clone()]).dot(&x.slice(s![.., r]).t());
        match comp.kind() {
            Kind::Euclidean => k += &g,
            Kind::Spherical => {
                let kap = comp.curvature();
                for (kv, gv) in k.iter_mut().zip(g.iter()) {
                    *kv += alpha_s * checked_asin(kap * gv)?;
                }
            }
            Kind::Hyperbolic => {
                let inv = 1.0 / (radii[h_idx] * radii[h_idx]);
                h_idx += 1;
                for (kv, gv) in k.iter_mut().zip(g.iter()) {
                    *kv += alpha_h * checked_asin(inv * gv)?;
                }
            }
        }
    }
    Ok(k)
}

/// Mistake-driven kernel perceptron on a precomputed Gram matrix; labels ±1.
pub fn fit_kernel_perceptron(k: ArrayView2<'_, f64>, y: &[f64], max_epochs: usize) -> Result<(Vec<f64>, usize, bool)> {
    let n = y.len();
    if k.dim() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: k.nrows() });
    }
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::invalid("perceptron labels must be -1 or +1"));
    }
    let mut beta = vec![0.0; n];
    for epoch in 0..max_epochs {
        let mut mistakes = 0;
        for i in 0..n {
            let f: f64 = k.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum();
            if y[i] * f <= 0.0 {
                beta[i] += y[i];
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            return Ok((beta, epoch + 1, true));
        }
    }
    Ok((beta, max_epochs, false))
}

/// Kernel perceptron over product-space points.
#[derive(Debug, Clone)]
pub struct KernelPerceptron {
    pub signature: Signature,
    pub train_x: Array2<f64>,
    pub state: KernelPerceptronState,
}

impl KernelPerceptron {
    pub fn fit(sig: &Signature, x: ArrayView2<'_, f64>, y: &[f64], alpha_s: f64, alpha_h: f64, max_epochs: usize) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.nrows(), found: y.len() });
        }
        let radii = hyperbolic_radii(sig, x);
        let k = perceptron_kernel(sig, x, x, &radii, alpha_s, alpha_h)?;
        let (beta, epochs_run, converged) = fit_kernel_perceptron(k.view(), y, max_epochs)?;
        let bias = beta.iter().sum();
        Ok(Self {
            signature: sig.clone(),
            train_x: x.to_owned(),
            state: KernelPerceptronState { beta, radii, alpha_s, alpha_h, bias, epochs_run, converged },
        })
    }

    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let s = &self.state;
        let k = perceptron_kernel(&self.signature, x, self.train_x.view(), &s.radii, s.alpha_s, s.alpha_h)?;
        Ok(k.dot(&Array1::from(s.beta.clone())).to_vec())
    }

    /// `±1`, with ties going to `+1`.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(self.decision_function(x)?.into_iter().map(|f| if f >= 0.0 { 1.0 } else { -1.0 }).collect())
    }
}

/// Projects rows of ambient points to stereographic coordinates.
pub fn to_stereographic(sig: &Signature, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    StereoProduct::new(sig).project_rows(x)
}
