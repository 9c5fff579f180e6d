#![allow(dead_code)]

pub mod cluster_oracle;
pub mod flat_gcn;
pub mod graph_oracle;
pub mod tree_oracle;

use kappa_core::manifolds::{ComponentManifold, Kind, Signature};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

pub const CURVATURES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

pub fn gaussian<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Point built by hand from the constraint, not through the library.
pub fn random_point<R: Rng>(m: &ComponentManifold, spread: f64, rng: &mut R) -> Vec<f64> {
    let k = m.curvature();
    match m.kind() {
        Kind::Euclidean => gaussian(m.dim(), rng).iter().map(|v| v * spread).collect(),
        Kind::Spherical => {
            let g = gaussian(m.dim() + 1, rng);
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            g.iter().map(|v| v / (n * k.sqrt())).collect()
        }
        Kind::Hyperbolic => {
            let rest: Vec<f64> = gaussian(m.dim(), rng).iter().map(|v| v * spread).collect();
            let sq: f64 = rest.iter().map(|v| v * v).sum();
            let mut x = vec![(1.0 / k.abs() + sq).sqrt()];
            x.extend(rest);
            x
        }
    }
}

pub fn random_product_point<R: Rng>(sig: &Signature, spread: f64, rng: &mut R) -> Vec<f64> {
    sig.components().iter().flat_map(|c| random_point(c, spread, rng)).collect()
}

pub fn random_points<R: Rng>(sig: &Signature, n: usize, spread: f64, rng: &mut R) -> Array2<f64> {
    let d = sig.ambient_dim();
    let flat: Vec<f64> = (0..n).flat_map(|_| random_product_point(sig, spread, rng)).collect();
    Array2::from_shape_vec((n, d), flat).unwrap()
}

pub fn random_tangent<R: Rng>(m: &ComponentManifold, x: &[f64], scale: f64, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = gaussian(x.len(), rng).iter().map(|v| v * scale).collect();
    m.project_tangent(x, &g)
}

pub fn bilinear(kind: Kind, u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    if kind == Kind::Hyperbolic {
        dot - 2.0 * u[0] * v[0]
    } else {
        dot
    }
}

/// Closed-form geodesic distance.
pub fn distance_oracle(m: &ComponentManifold, x: &[f64], y: &[f64]) -> f64 {
    let k = m.curvature();
    match m.kind() {
        Kind::Euclidean => x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
        Kind::Spherical => (k * bilinear(Kind::Spherical, x, y)).clamp(-1.0, 1.0).acos() / k.sqrt(),
        Kind::Hyperbolic => (k * bilinear(Kind::Hyperbolic, x, y)).max(1.0).acosh() / k.abs().sqrt(),
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn heap_tree_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| ((i - 1) / 2, i)).collect()
}
