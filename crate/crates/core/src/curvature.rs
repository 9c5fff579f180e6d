//! Curvature estimates from distances: Gromov δ-hyperbolicity, sectional
//! curvature on manifolds and graphs, and greedy signature selection.

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embed::{avg_distortion, fit_coordinates, EmbedConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::manifolds::{ComponentManifold, DistanceMatrix, Signature};
use crate::rng::derive_seed;
use crate::sampling::Task;
use crate::trees::{accuracy, mse, ProductDT, TreeConfig};

/// Largest input accepted by the O(n⁴) all-bases scan.
pub const ALL_BASES_MAX_N: usize = 64;

/// `(x, y)_w = (d(w,x) + d(w,y) − d(x,y)) / 2`.
pub fn gromov_product(d: &DistanceMatrix, x: usize, y: usize, w: usize) -> f64 {
    0.5 * (d.get(w, x) + d.get(w, y) - d.get(x, y))
}

/// Gromov products of every pair relative to a fixed base point.
#[derive(Debug, Clone, PartialEq)]
pub struct GromovMatrix {
    pub base: usize,
    pub g: Array2<f64>,
}

impl GromovMatrix {
    pub fn new(d: &DistanceMatrix, base: usize) -> Result<Self> {
        let n = d.len();
        if base >= n {
            return Err(Error::invalid(format!("base index {base} out of range for {n} points")));
        }
        let g = Array2::from_shape_fn((n, n), |(i, j)| gromov_product(d, i, j, base));
        Ok(Self { base, g })
    }

    /// `max_{i,j} (max_k min(G_ik, G_kj) − G_ij)`, computed row by row.
    pub fn delta(&self) -> f64 {
        let g = &self.g;
        let n = g.nrows();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let gi = g.row(i);
                let mut best = f64::NEG_INFINITY;
                for j in 0..n {
                    let mut mm = f64::NEG_INFINITY;
                    for k in 0..n {
                        mm = mm.max(gi[k].min(g[[k, j]]));
                    }
                    best = best.max(mm - gi[j]);
                }
                best
            })
            .reduce(|| f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

fn check_delta_input(d: &DistanceMatrix) -> Result<()> {
    if d.len() < 4 {
        return Err(Error::invalid(format!("δ-hyperbolicity needs at least 4 points, got {}", d.len())));
    }
    Ok(())
}

/// Exact fixed-base δ.
pub fn delta_hyperbolicity(d: &DistanceMatrix, base: usize) -> Result<f64> {
    check_delta_input(d)?;
    Ok(GromovMatrix::new(d, base)?.delta())
}

/// δ maximised over every base point. Quartic; limited to small inputs.
pub fn delta_hyperbolicity_all_bases(d: &DistanceMatrix) -> Result<f64> {
    check_delta_input(d)?;
    if d.len() > ALL_BASES_MAX_N {
        return Err(Error::invalid(format!("all-bases δ limited to {ALL_BASES_MAX_N} points, got {}", d.len())));
    }
    let per_base = (0..d.len())
        .into_par_iter()
        .map(|w| GromovMatrix::new(d, w).map(|g| g.delta()))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_base.into_iter().fold(0.0, f64::max))
}

/// Fixed-base δ over `n_samples` random triples; a lower bound on the exact value.
pub fn delta_hyperbolicity_sampled<R: Rng + ?Sized>(
    d: &DistanceMatrix,
    base: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_delta_input(d)?;
    if base >= d.len() {
        return Err(Error::invalid(format!("base index {base} out of range for {} points", d.len())));
    }
    let n = d.len();
    let mut best = 0.0f64;
    for _ in 0..n_samples {
        let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        let v = gromov_product(d, x, y, base).min(gromov_product(d, y, z, base)) - gromov_product(d, x, z, base);
        best = best.max(v);
    }
    Ok(best)
}

/// `2δ / diam(D)`.
pub fn relative_delta(d: &DistanceMatrix, delta: f64) -> Result<f64> {
    let m = d.max();
    if m <= 0.0 {
        return Err(Error::invalid("relative δ is undefined for an all-zero distance matrix"));
    }
    Ok(2.0 * delta / m)
}

fn parallelogram_defect(am: f64, bc: f64, ab: f64, ac: f64) -> f64 {
    am * am + bc * bc / 4.0 - (ab * ab + ac * ac) / 2.0
}

/// Parallelogram-law defect of the triangle `(a, b, c)` against the true
/// geodesic midpoint of `b` and `c`. Zero in flat space, positive on spheres,
/// negative on hyperbolic space.
pub fn sectional_curvature_manifold(sig: &Signature, a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    let v = sig.log_map(b, c)?;
    let half: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
    let m = sig.exp_map(b, &half)?;
    Ok(parallelogram_defect(
        sig.distance(a, &m)?,
        sig.distance(b, c)?,
        sig.distance(a, b)?,
        sig.distance(a, c)?,
    ))
}

fn check_graph_triple(g: &Graph, d: &DistanceMatrix, m: usize, b: usize, c: usize) -> Result<()> {
    if g.node_count() != d.len() {
        return Err(Error::DimensionMismatch { expected: d.len(), found: g.node_count() });
    }
    let n = d.len();
    if m >= n || b >= n || c >= n {
        return Err(Error::invalid("node index out of range"));
    }
    if b == c || !g.has_edge(m, b) || !g.has_edge(m, c) {
        return Err(Error::invalid(format!("nodes {b} and {c} must be distinct neighbours of {m}")));
    }
    Ok(())
}

/// Per-reference graph curvature `ξ(m; b, c; a)` for every `a`, with `m`
/// standing in as the midpoint of its neighbours `b` and `c`. Entries for
/// `a = m` (or any `a` at distance zero from `m`) are `None`.
pub fn sectional_curvature_graph_terms(
    d: &DistanceMatrix,
    g: &Graph,
    m: usize,
    b: usize,
    c: usize,
) -> Result<Vec<Option<f64>>> {
    check_graph_triple(g, d, m, b, c)?;
    Ok((0..d.len())
        .map(|a| {
            let am = d.get(a, m);
            if a == m || am == 0.0 {
                return None;
            }
            Some(parallelogram_defect(am, d.get(b, c), d.get(a, b), d.get(a, c)) / (2.0 * am))
        })
        .collect())
}

/// `ξ(m; b, c)`: mean of the per-reference terms over the admissible `a`.
pub fn sectional_curvature_graph(d: &DistanceMatrix, g: &Graph, m: usize, b: usize, c: usize) -> Result<f64> {
    let terms: Vec<f64> = sectional_curvature_graph_terms(d, g, m, b, c)?.into_iter().flatten().collect();
    if terms.is_empty() {
        return Err(Error::invalid("no reference node at positive distance from the midpoint"));
    }
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// Curvature at `m` averaged over every pair of its neighbours; `None` when
/// `m` has fewer than two neighbours.
pub fn sectional_curvature_node(d: &DistanceMatrix, g: &Graph, m: usize) -> Result<Option<f64>> {
    let nb: Vec<usize> = g.neighbors(m).collect();
    if nb.len() < 2 {
        return Ok(None);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, &b) in nb.iter().enumerate() {
        for &c in &nb[i + 1..] {
            sum += sectional_curvature_graph(d, g, m, b, c)?;
            count += 1;
        }
    }
    Ok(Some(sum / count as f64))
}

/// [`sectional_curvature_node`] for every node.
pub fn sectional_curvature_nodes(d: &DistanceMatrix, g: &Graph) -> Result<Vec<Option<f64>>> {
    (0..d.len()).into_par_iter().map(|m| sectional_curvature_node(d, g, m)).collect()
}

/// A scalar loss for a candidate signature; the `u64` is a per-evaluation seed.
pub trait Pipeline: Sync {
    fn evaluate(&self, sig: &Signature, seed: u64) -> Result<f64>;
}

impl<F> Pipeline for F
where
    F: Fn(&Signature, u64) -> Result<f64> + Sync,
{
    fn evaluate(&self, sig: &Signature, seed: u64) -> Result<f64> {
        self(sig, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyConfig {
    pub candidates: Vec<ComponentManifold>,
    pub max_components: usize,
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            candidates: vec![
                ComponentManifold::new(-1.0, 2).expect("valid"),
                ComponentManifold::euclidean(2),
                ComponentManifold::new(1.0, 2).expect("valid"),
            ],
            max_components: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    pub signature: Signature,
    /// Loss of each accepted step.
    pub losses: Vec<f64>,
    /// Loss of every candidate at every iteration, in candidate order.
    pub trials: Vec<Vec<f64>>,
}

/// Grows a signature one component at a time, keeping whichever candidate
/// gives the lowest pipeline loss; stops when no candidate improves on the
/// incumbent or `max_components` is reached.
pub fn greedy_signature_search<P: Pipeline + ?Sized>(pipeline: &P, cfg: &GreedyConfig) -> Result<GreedyResult> {
    if cfg.candidates.is_empty() {
        return Err(Error::invalid("greedy search needs at least one candidate"));
    }
    if cfg.max_components == 0 {
        return Err(Error::invalid("max_components must be at least 1"));
    }
    let mut current: Vec<ComponentManifold> = Vec::new();
    let mut incumbent = f64::INFINITY;
    let mut losses = Vec::new();
    let mut trials = Vec::new();
    for iter in 0..cfg.max_components {
        let evals: Vec<Result<f64>> = cfg
            .candidates
            .par_iter()
            .enumerate()
            .map(|(k, cand)| {
                let mut comps = current.clone();
                comps.push(*cand);
                let sig = Signature::new(comps)?;
                pipeline.evaluate(&sig, derive_seed(cfg.seed, &[iter as u64, k as u64]))
            })
            .collect();
        let mut scores = Vec::with_capacity(evals.len());
        for e in evals {
            match e {
                Ok(v) => scores.push(v),
                Err(source) => {
                    let partial = current.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
                    return Err(Error::Pipeline { partial, source: Box::new(source) });
                }
            }
        }
        let (best_k, best) = scores
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::invalid("pipeline returned NaN for every candidate"))?;
        trials.push(scores);
        if best >= incumbent {
            break;
        }
        incumbent = best;
        current.push(cfg.candidates[best_k]);
        losses.push(best);
    }
    Ok(GreedyResult { signature: Signature::new(current)?, losses, trials })
}

/// Embeds `d` with coordinate learning and scores the final average distortion.
#[derive(Debug, Clone)]
pub struct DistortionPipeline<'a> {
    pub distances: &'a DistanceMatrix,
    pub embed: EmbedConfig,
}

impl Pipeline for DistortionPipeline<'_> {
    fn evaluate(&self, sig: &Signature, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let res = fit_coordinates(self.distances, sig, &self.embed, &mut rng)?;
        avg_distortion(&res.signature, res.x.view(), self.distances)
    }
}

/// Embeds `d`, fits a decision tree on a fixed 80/20 split of the embedding
/// and scores it: negative accuracy for classification, MSE for regression.
#[derive(Debug, Clone)]
pub struct PredictorPipeline<'a> {
    pub distances: &'a DistanceMatrix,
    pub labels: &'a [f64],
    pub task: Task,
    pub embed: EmbedConfig,
    pub tree: TreeConfig,
}

/// Deterministic 80/20 split by index: every fifth point is held out.
pub fn holdout_split(n: usize) -> (Vec<usize>, Vec<usize>) {
    (0..n).partition(|i| i % 5 != 4)
}

impl Pipeline for PredictorPipeline<'_> {
    fn evaluate(&self, sig: &Signature, seed: u64) -> Result<f64> {
        if self.labels.len() != self.distances.len() {
            return Err(Error::DimensionMismatch { expected: self.distances.len(), found: self.labels.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let res = fit_coordinates(self.distances, sig, &self.embed, &mut rng)?;
        let (train, test) = holdout_split(self.labels.len());
        let pick = |x: ArrayView2<'_, f64>, idx: &[usize]| x.select(Axis(0), idx);
        let ytr: Vec<f64> = train.iter().map(|&i| self.labels[i]).collect();
        let yte: Vec<f64> = test.iter().map(|&i| self.labels[i]).collect();
        let tree = ProductDT::fit(&res.signature, pick(res.x.view(), &train).view(), &ytr, self.task, &self.tree)?;
        let pred = tree.predict(pick(res.x.view(), &test).view())?;
        Ok(match self.task {
            Task::Classification => -accuracy(&pred, &yte),
            Task::Regression => mse(&pred, &yte),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(n: usize, e: &[(usize, usize)]) -> (Graph, DistanceMatrix) {
        let g = Graph::from_unweighted(n, e).unwrap();
        let d = g.distance_matrix().unwrap();
        (g, d)
    }

    #[test]
    fn gromov_examples() {
        let (_, d) = unit(3, &[(0, 1), (1, 2), (0, 2)]);
        let d2 = DistanceMatrix::new(d.as_array() * 2.0).unwrap();
        assert_eq!(gromov_product(&d2, 0, 1, 2), 1.0);
        assert_eq!(gromov_product(&d2, 2, 1, 2), 0.0);
        assert_eq!(gromov_product(&d2, 0, 0, 2), 2.0);
    }

    #[test]
    fn four_cycle_and_star() {
        let (_, c4) = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(delta_hyperbolicity(&c4, 0).unwrap(), 1.0);
        let (_, star) = unit(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(delta_hyperbolicity(&star, 0).unwrap(), 0.0);
        assert!(delta_hyperbolicity(&unit(3, &[(0, 1), (1, 2)]).1, 0).is_err());
    }

    #[test]
    fn relative() {
        let (_, c4) = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(relative_delta(&c4, 1.0).unwrap(), 1.0);
        assert_eq!(relative_delta(&c4, 0.0).unwrap(), 0.0);
        let zero = DistanceMatrix::new(Array2::zeros((4, 4))).unwrap();
        assert!(relative_delta(&zero, 0.0).is_err());
    }

    #[test]
    fn graph_curvature_signs() {
        let (g, d) = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_abs_diff_eq!(sectional_curvature_node(&d, &g, 2).unwrap().unwrap(), 0.0);
        assert_eq!(sectional_curvature_node(&d, &g, 0).unwrap(), None);
        let (g, d) = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        for m in 0..4 {
            assert_abs_diff_eq!(sectional_curvature_node(&d, &g, m).unwrap().unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        }
        assert!(sectional_curvature_graph(&d, &g, 0, 1, 2).is_err());
    }

    #[test]
    fn greedy_single_choice() {
        let cfg = GreedyConfig { candidates: vec![ComponentManifold::euclidean(2)], max_components: 1, seed: 3 };
        let r = greedy_signature_search(&|_: &Signature, _: u64| Ok(1.0), &cfg).unwrap();
        assert_eq!(r.signature.to_string(), "E2");
        assert_eq!(r.losses, vec![1.0]);
    }

    #[test]
    fn greedy_stops_without_improvement() {
        let cfg = GreedyConfig::default();
        let r = greedy_signature_search(&|s: &Signature, _: u64| Ok(s.len() as f64), &cfg).unwrap();
        assert_eq!(r.signature.len(), 1);
        assert_eq!(r.signature.to_string(), "H2@-1");
    }

    #[test]
    fn greedy_reports_partial_signature() {
        let cfg = GreedyConfig::default();
        let f = |s: &Signature, _: u64| {
            if s.len() > 1 { Err(Error::invalid("boom")) } else { Ok(-(s.len() as f64)) }
        };
        match greedy_signature_search(&f, &cfg).unwrap_err() {
            Error::Pipeline { partial, .. } => assert_eq!(partial, "H2@-1"),
            e => panic!("{e}"),
        }
    }
}
