use kappa_core::{DistanceMatrix, Graph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_unweighted(n, &edges).unwrap()
}

/// Fixed-base four-point scan written straight from the Gromov-product definition.
pub fn brute_delta(d: &DistanceMatrix, w: usize) -> f64 {
    let n = d.len();
    let g = |x: usize, y: usize| (d.get(x, w) + d.get(y, w) - d.get(x, y)) / 2.0;
    let mut best = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                best = best.max(g(x, y).min(g(y, z)) - g(x, z));
            }
        }
    }
    best
}
