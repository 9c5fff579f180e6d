//! Product-space decision trees and random forests with angular splits.
//!
//! Every (component, dimension) pair defines a 2-D projection `(x₀, x_d)`
//! whose angle `atan2(x₀, x_d)`, folded to `[0, π)`, is the split feature.
//! Euclidean components use a homogeneous `x₀ = 1`, so their angular splits
//! are ordinary thresholds in disguise.

use std::f64::consts::PI;

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifolds::{Kind, Signature};
use crate::rng::derive_seed;
use crate::sampling::Task;

/// Ties between split scores closer than this are broken lexicographically.
const SCORE_TIE: f64 = 1e-12;

fn fold_half_circle(a: f64) -> f64 {
    let mut a = a % PI;
    if a < 0.0 {
        a += PI;
    }
    if a >= PI {
        a -= PI;
    }
    a
}

/// Angle of the projection `(x₀, x_d)`, in `[0, π)`.
pub fn project_angle(x0: f64, xd: f64) -> Result<f64> {
    if x0 == 0.0 && xd == 0.0 {
        return Err(Error::invalid("zero projection has no angle"));
    }
    Ok(fold_half_circle(x0.atan2(xd)))
}

/// Geodesic midpoint between two projection angles `θ_u < θ_v`.
pub fn midpoint_angle(kind: Kind, theta_u: f64, theta_v: f64) -> f64 {
    let (a, b) = if theta_u <= theta_v { (theta_u, theta_v) } else { (theta_v, theta_u) };
    match kind {
        Kind::Spherical => 0.5 * (a + b),
        Kind::Euclidean => {
            // Homogeneous coordinates: x_d = cot θ.
            let (ud, vd) = (a.cos() / a.sin(), b.cos() / b.sin());
            fold_half_circle(1f64.atan2(0.5 * (ud + vd)))
        }
        Kind::Hyperbolic => {
            let s = (a + b).sin();
            if s.abs() < 1e-15 || b - a < 1e-15 {
                return 0.5 * (a + b);
            }
            let v = (2.0 * a - 2.0 * b).sin() / (2.0 * s * (b - a).sin());
            let r = (v * v - 1.0).max(0.0).sqrt();
            let y = if a + b < PI { v - r } else { v + r };
            fold_half_circle((-y).atan())
        }
    }
}

/// Axis-angle split: a point goes right when its angle in
/// `(component, dim)` lies in `[θ, θ + π)`, i.e. is at least `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCriterion {
    pub component: usize,
    /// 1-based index of the spatial coordinate paired with `x₀`.
    pub dim: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Feature {
    component: usize,
    dim: usize,
    kind: Kind,
    x0: Option<usize>,
    xd: usize,
}

fn features(sig: &Signature) -> Vec<Feature> {
    let mut out = Vec::new();
    for (c, comp) in sig.components().iter().enumerate() {
        let start = sig.range(c).start;
        for d in 1..=comp.dim() {
            let (x0, xd) = if comp.is_curved() { (Some(start), start + d) } else { (None, start + d - 1) };
            out.push(Feature { component: c, dim: d, kind: comp.kind(), x0, xd });
        }
    }
    out
}

fn feature_angle(f: &Feature, x: &[f64]) -> Result<f64> {
    project_angle(f.x0.map_or(1.0, |i| x[i]), x[f.xd])
}

impl SplitCriterion {
    pub fn goes_right(&self, sig: &Signature, x: &[f64]) -> Result<bool> {
        let f = features(sig)
            .into_iter()
            .find(|f| f.component == self.component && f.dim == self.dim)
            .ok_or_else(|| Error::invalid("split refers to a missing component dimension"))?;
        Ok(feature_angle(&f, x)? >= self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impurity {
    Gini,
    Entropy,
    Variance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// `None` uses Gini for classification and variance for regression.
    pub impurity: Option<Impurity>,
    /// Fraction of features examined at each split (forests); 1.0 examines all.
    pub feature_fraction: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_depth: 3, min_leaf: 1, impurity: None, feature_fraction: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split { criterion: SplitCriterion, feature: usize, left: Box<TreeNode>, right: Box<TreeNode> },
    /// Normalised class histogram (classification) or single mean (regression).
    Leaf { value: Vec<f64> },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn root_split(&self) -> Option<SplitCriterion> {
        match self {
            TreeNode::Split { criterion, .. } => Some(*criterion),
            TreeNode::Leaf { .. } => None,
        }
    }
}

/// A candidate split from the exhaustive scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSplit {
    pub score: f64,
    pub criterion: SplitCriterion,
    feature: usize,
    position: usize,
}

struct Fitter<'a> {
    angles: Vec<Vec<f64>>,
    feats: &'a [Feature],
    targets: Vec<f64>,
    n_classes: usize,
    impurity: Impurity,
    cfg: &'a TreeConfig,
}

fn impurity_of(kind: Impurity, counts: &[f64], sum: f64, sumsq: f64, n: f64) -> f64 {
    match kind {
        Impurity::Gini => 1.0 - counts.iter().map(|c| (c / n).powi(2)).sum::<f64>(),
        Impurity::Entropy => -counts
            .iter()
            .filter(|c| **c > 0.0)
            .map(|c| {
                let p = c / n;
                p * p.ln()
            })
            .sum::<f64>(),
        Impurity::Variance => (sumsq / n - (sum / n).powi(2)).max(0.0),
    }
}

impl Fitter<'_> {
    fn leaf(&self, idx: &[usize]) -> TreeNode {
        if self.impurity == Impurity::Variance {
            let m = idx.iter().map(|&i| self.targets[i]).sum::<f64>() / idx.len() as f64;
            TreeNode::Leaf { value: vec![m] }
        } else {
            let mut h = vec![0.0; self.n_classes];
            for &i in idx {
                h[self.targets[i] as usize] += 1.0;
            }
            let n = idx.len() as f64;
            h.iter_mut().for_each(|v| *v /= n);
            TreeNode::Leaf { value: h }
        }
    }

    fn is_pure(&self, idx: &[usize]) -> bool {
        let first = self.targets[idx[0]];
        idx.iter().all(|&i| self.targets[i] == first)
    }

    /// Every admissible split of `idx` on the given features.
    fn candidates(&self, idx: &[usize], feats: &[usize]) -> Vec<ScoredSplit> {
        let per_feature: Vec<Vec<ScoredSplit>> = feats
            .par_iter()
            .map(|&f| self.scan_feature(idx, f))
            .collect();
        per_feature.into_iter().flatten().collect()
    }

    fn scan_feature(&self, idx: &[usize], f: usize) -> Vec<ScoredSplit> {
        let ang = &self.angles[f];
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| ang[a].total_cmp(&ang[b]).then(a.cmp(&b)));
        let n = order.len();
        let nf = n as f64;
        let classify = self.impurity != Impurity::Variance;
        let k = if classify { self.n_classes } else { 0 };
        let mut lc = vec![0.0; k];
        let mut rc = vec![0.0; k];
        let (mut ls, mut lq, mut rs, mut rq) = (0.0, 0.0, 0.0, 0.0);
        for &i in &order {
            let t = self.targets[i];
            if classify {
                rc[t as usize] += 1.0;
            } else {
                rs += t;
                rq += t * t;
            }
        }
        let mut out = Vec::new();
        let feat = &self.feats[f];
        for pos in 0..n - 1 {
            let i = order[pos];
            let t = self.targets[i];
            if classify {
                lc[t as usize] += 1.0;
                rc[t as usize] -= 1.0;
            } else {
                ls += t;
                lq += t * t;
                rs -= t;
                rq -= t * t;
            }
            let (a, b) = (ang[i], ang[order[pos + 1]]);
            let nl = pos + 1;
            if a == b || nl < self.cfg.min_leaf || n - nl < self.cfg.min_leaf {
                continue;
            }
            let (nlf, nrf) = (nl as f64, (n - nl) as f64);
            let score = (nlf * impurity_of(self.impurity, &lc, ls, lq, nlf)
                + nrf * impurity_of(self.impurity, &rc, rs, rq, nrf))
                / nf;
            let mut theta = midpoint_angle(feat.kind, a, b);
            if !(theta > a && theta <= b) {
                theta = b;
            }
            out.push(ScoredSplit {
                score,
                criterion: SplitCriterion { component: feat.component, dim: feat.dim, theta },
                feature: f,
                position: pos,
            });
        }
        out
    }

    fn grow<R: Rng>(&self, idx: Vec<usize>, depth: usize, rng: &mut Option<R>) -> TreeNode {
        if depth >= self.cfg.max_depth || idx.len() < 2 * self.cfg.min_leaf.max(1) || self.is_pure(&idx) {
            return self.leaf(&idx);
        }
        let all: Vec<usize> = (0..self.feats.len()).collect();
        let feats = match rng {
            Some(r) if self.cfg.feature_fraction < 1.0 => {
                let m = ((self.feats.len() as f64 * self.cfg.feature_fraction).ceil() as usize).clamp(1, self.feats.len());
                let mut s = sample(r, self.feats.len(), m).into_vec();
                s.sort_unstable();
                s
            }
            _ => all,
        };
        let Some(best) = select_best(&self.candidates(&idx, &feats)) else {
            return self.leaf(&idx);
        };
        let ang = &self.angles[best.feature];
        let (left, right): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| ang[i] < best.criterion.theta);
        if left.is_empty() || right.is_empty() {
            return self.leaf(&idx);
        }
        TreeNode::Split {
            criterion: best.criterion,
            feature: best.feature,
            left: Box::new(self.grow(left, depth + 1, rng)),
            right: Box::new(self.grow(right, depth + 1, rng)),
        }
    }
}

/// Lowest score, ties within 1e-12 broken by (component, dim, θ).
pub fn select_best(cands: &[ScoredSplit]) -> Option<ScoredSplit> {
    let min = cands.iter().map(|c| c.score).fold(f64::INFINITY, f64::min);
    cands
        .iter()
        .filter(|c| c.score <= min + SCORE_TIE)
        .min_by(|p, q| {
            (p.criterion.component, p.criterion.dim)
                .cmp(&(q.criterion.component, q.criterion.dim))
                .then(p.criterion.theta.total_cmp(&q.criterion.theta))
        })
        .copied()
}

/// A fitted product-space decision tree.
#[derive(Debug, Clone)]
pub struct ProductDT {
    sig: Signature,
    task: Task,
    /// Sorted distinct class labels; empty for regression.
    classes: Vec<f64>,
    feats: Vec<Feature>,
    root: TreeNode,
}

fn validate_xy(sig: &Signature, x: &ArrayView2<'_, f64>, y: &[f64]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: y.len() });
    }
    if x.ncols() != sig.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), found: x.ncols() });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("labels must be finite"));
    }
    Ok(())
}

fn angle_table(feats: &[Feature], x: &ArrayView2<'_, f64>) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    feats
        .iter()
        .map(|f| rows.iter().map(|r| feature_angle(f, r)).collect::<Result<Vec<f64>>>())
        .collect()
}

impl ProductDT {
    pub fn fit(sig: &Signature, x: ArrayView2<'_, f64>, y: &[f64], task: Task, cfg: &TreeConfig) -> Result<Self> {
        Self::fit_with_rng(sig, x, y, task, cfg, None::<&mut ChaCha8Rng>)
    }

    fn fit_with_rng<R: Rng>(
        sig: &Signature,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        task: Task,
        cfg: &TreeConfig,
        rng: Option<R>,
    ) -> Result<Self> {
        validate_xy(sig, &x, y)?;
        if cfg.min_leaf == 0 {
            return Err(Error::invalid("min_leaf must be at least 1"));
        }
        let feats = features(sig);
        let angles = angle_table(&feats, &x)?;
        let (classes, targets) = match task {
            Task::Classification => {
                let mut c: Vec<f64> = y.to_vec();
                c.sort_by(f64::total_cmp);
                c.dedup();
                let t = y.iter().map(|v| c.binary_search_by(|p| p.total_cmp(v)).unwrap() as f64).collect();
                (c, t)
            }
            Task::Regression => (Vec::new(), y.to_vec()),
        };
        let impurity = match (task, cfg.impurity) {
            (Task::Regression, _) => Impurity::Variance,
            (Task::Classification, Some(Impurity::Variance)) | (Task::Classification, None) => Impurity::Gini,
            (Task::Classification, Some(i)) => i,
        };
        let fitter = Fitter { angles, feats: &feats, targets, n_classes: classes.len(), impurity, cfg };
        let mut rng = rng;
        let root = fitter.grow((0..y.len()).collect(), 0, &mut rng);
        Ok(Self { sig: sig.clone(), task, classes, feats, root })
    }

    /// All admissible root splits with their scores, for inspection and testing.
    pub fn root_candidates(sig: &Signature, x: ArrayView2<'_, f64>, y: &[f64], task: Task, cfg: &TreeConfig) -> Result<Vec<ScoredSplit>> {
        let tree = Self::fit(sig, x, y, task, &TreeConfig { max_depth: 0, ..cfg.clone() })?;
        let angles = angle_table(&tree.feats, &x)?;
        let targets = match task {
            Task::Classification => {
                y.iter().map(|v| tree.classes.binary_search_by(|p| p.total_cmp(v)).unwrap() as f64).collect()
            }
            Task::Regression => y.to_vec(),
        };
        let impurity = if task == Task::Regression { Impurity::Variance } else { cfg.impurity.filter(|i| *i != Impurity::Variance).unwrap_or(Impurity::Gini) };
        let fitter = Fitter { angles, feats: &tree.feats, targets, n_classes: tree.classes.len(), impurity, cfg };
        let all: Vec<usize> = (0..tree.feats.len()).collect();
        Ok(fitter.candidates(&(0..y.len()).collect::<Vec<_>>(), &all))
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    fn leaf_for(&self, x: &[f64]) -> Result<&[f64]> {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { value } => return Ok(value),
                TreeNode::Split { criterion, feature, left, right } => {
                    let a = feature_angle(&self.feats[*feature], x)?;
                    node = if a >= criterion.theta { right } else { left };
                }
            }
        }
    }

    fn check_x(&self, x: &ArrayView2<'_, f64>) -> Result<()> {
        if x.ncols() != self.sig.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.sig.ambient_dim(), found: x.ncols() });
        }
        Ok(())
    }

    /// Class probabilities, one row per point, columns ordered as [`Self::classes`].
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<Vec<f64>>> {
        self.check_x(&x)?;
        if self.task != Task::Classification {
            return Err(Error::invalid("predict_proba needs a classification tree"));
        }
        x.rows().into_iter().map(|r| Ok(self.leaf_for(&r.to_vec())?.to_vec())).collect()
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        self.check_x(&x)?;
        x.rows()
            .into_iter()
            .map(|r| {
                let leaf = self.leaf_for(&r.to_vec())?;
                Ok(match self.task {
                    Task::Regression => leaf[0],
                    Task::Classification => self.classes[argmax(leaf)],
                })
            })
            .collect()
    }

    /// Accuracy for classification, R² for regression.
    pub fn score(&self, x: ArrayView2<'_, f64>, y: &[f64]) -> Result<f64> {
        let p = self.predict(x)?;
        Ok(score(self.task, &p, y))
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub fn accuracy(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len().max(1) as f64
}

pub fn mse(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len().max(1) as f64
}

fn score(task: Task, pred: &[f64], y: &[f64]) -> f64 {
    match task {
        Task::Classification => accuracy(pred, y),
        Task::Regression => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
            let res: f64 = pred.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            if tot == 0.0 {
                if res == 0.0 { 1.0 } else { 0.0 }
            } else {
                1.0 - res / tot
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    /// Bootstrap sample size as a fraction of the data; `None` disables resampling.
    pub bootstrap: Option<f64>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 50,
            tree: TreeConfig { feature_fraction: 0.5, ..TreeConfig::default() },
            bootstrap: Some(1.0),
            seed: 0,
        }
    }
}

/// Bootstrap ensemble of [`ProductDT`]s.
#[derive(Debug, Clone)]
pub struct ProductRF {
    task: Task,
    classes: Vec<f64>,
    trees: Vec<ProductDT>,
}

impl ProductRF {
    pub fn fit(sig: &Signature, x: ArrayView2<'_, f64>, y: &[f64], task: Task, cfg: &ForestConfig) -> Result<Self> {
        validate_xy(sig, &x, y)?;
        if cfg.n_trees == 0 {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        let mut classes: Vec<f64> = if task == Task::Classification { y.to_vec() } else { Vec::new() };
        classes.sort_by(f64::total_cmp);
        classes.dedup();
        let x = x.as_standard_layout().into_owned();
        let n = y.len();
        let trees = (0..cfg.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[t as u64]));
                let idx: Vec<usize> = match cfg.bootstrap {
                    Some(f) => {
                        let m = ((n as f64 * f).round() as usize).max(1);
                        (0..m).map(|_| rng.random_range(0..n)).collect()
                    }
                    None => (0..n).collect(),
                };
                let xs = x.select(ndarray::Axis(0), &idx);
                let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
                ProductDT::fit_with_rng(sig, xs.view(), &ys, task, &cfg.tree, Some(rng))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { task, classes, trees })
    }

    pub fn trees(&self) -> &[ProductDT] {
        &self.trees
    }

    /// Mean of per-tree class probabilities over the forest's class set.
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<Vec<f64>>> {
        let mut acc = vec![vec![0.0; self.classes.len()]; x.nrows()];
        for t in &self.trees {
            let p = t.predict_proba(x)?;
            for (row, pr) in acc.iter_mut().zip(p) {
                for (c, v) in t.classes().iter().zip(pr) {
                    let k = self.classes.binary_search_by(|q| q.total_cmp(c)).unwrap();
                    row[k] += v;
                }
            }
        }
        let m = self.trees.len() as f64;
        acc.iter_mut().flatten().for_each(|v| *v /= m);
        Ok(acc)
    }

    /// Majority vote (ties to the smallest label) or mean prediction.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        match self.task {
            Task::Regression => {
                let mut acc = vec![0.0; x.nrows()];
                for t in &self.trees {
                    for (a, p) in acc.iter_mut().zip(t.predict(x)?) {
                        *a += p;
                    }
                }
                let m = self.trees.len() as f64;
                Ok(acc.into_iter().map(|v| v / m).collect())
            }
            Task::Classification => {
                let mut votes = vec![vec![0usize; self.classes.len()]; x.nrows()];
                for t in &self.trees {
                    for (row, p) in votes.iter_mut().zip(t.predict(x)?) {
                        row[self.classes.binary_search_by(|q| q.total_cmp(&p)).unwrap()] += 1;
                    }
                }
                Ok(votes
                    .into_iter()
                    .map(|row| {
                        let mut best = 0;
                        for (i, v) in row.iter().enumerate() {
                            if *v > row[best] {
                                best = i;
                            }
                        }
                        self.classes[best]
                    })
                    .collect())
            }
        }
    }

    pub fn score(&self, x: ArrayView2<'_, f64>, y: &[f64]) -> Result<f64> {
        let p = self.predict(x)?;
        Ok(score(self.task, &p, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn angles() {
        assert_abs_diff_eq!(project_angle(1.0, 1.0).unwrap(), PI / 4.0);
        assert!(project_angle(1.0, 1e12).unwrap() < 1e-11);
        assert_abs_diff_eq!(project_angle(1.0, 2.0).unwrap(), 0.5f64.atan());
        assert!(project_angle(0.0, 0.0).is_err());
        // Negative x₀ folds onto the half circle.
        assert_abs_diff_eq!(project_angle(-1.0, -1.0).unwrap(), PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn midpoints() {
        assert_abs_diff_eq!(midpoint_angle(Kind::Spherical, 0.3, 0.5), 0.4);
        let (u, v) = (project_angle(1.0, 1.0).unwrap(), project_angle(1.0, 3.0).unwrap());
        assert_abs_diff_eq!(midpoint_angle(Kind::Euclidean, u, v), 0.5f64.atan(), epsilon = 1e-15);
        // Symmetric pair about π/2 on the hyperboloid: the bisector.
        assert_abs_diff_eq!(midpoint_angle(Kind::Hyperbolic, 1.0, PI - 1.0), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn indicator_boundary() {
        let sig = Signature::parse("E1").unwrap();
        let x = [1.0];
        let theta = PI / 4.0;
        assert!(SplitCriterion { component: 0, dim: 1, theta }.goes_right(&sig, &x).unwrap());
        assert!(SplitCriterion { component: 0, dim: 1, theta: 0.0 }.goes_right(&sig, &x).unwrap());
    }

    #[test]
    fn separable_data_is_fit_exactly() {
        let sig = Signature::parse("E2").unwrap();
        let x = array![[0.0, 0.0], [1.0, 0.5], [0.2, 1.0], [3.0, 0.1], [4.0, 2.0], [5.0, -1.0]];
        let y = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let t = ProductDT::fit(&sig, x.view(), &y, Task::Classification, &TreeConfig::default()).unwrap();
        assert_eq!(t.score(x.view(), &y).unwrap(), 1.0);
        let p = t.predict_proba(x.view()).unwrap();
        assert!(p.iter().all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn regression_leaf_means() {
        let sig = Signature::parse("E1").unwrap();
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [0.0, 0.0, 1.0, 1.0];
        let t = ProductDT::fit(&sig, x.view(), &y, Task::Regression, &TreeConfig { max_depth: 1, ..Default::default() }).unwrap();
        assert_eq!(t.predict(x.view()).unwrap(), y.to_vec());
    }
}
