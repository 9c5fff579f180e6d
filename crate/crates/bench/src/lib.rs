//! Shared fixtures for the benchmarks.

use kappa_core::sampling::WrappedNormal;
use kappa_core::{DistanceMatrix, Graph, Signature};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` wrapped-normal samples around the origin of `spec`.
pub fn points(spec: &str, n: usize, seed: u64) -> (Signature, Array2<f64>) {
    let sig = Signature::parse(spec).expect("valid signature");
    let wn = WrappedNormal::isotropic(&sig, sig.origin(), &vec![1.0; sig.len()]).expect("valid distribution");
    let x = wn.sample_n(n, &mut rng(seed));
    (sig, x)
}

/// Complete binary tree on `n` nodes in heap order.
pub fn binary_tree(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| ((i - 1) / 2, i)).collect();
    Graph::from_unweighted(n, &edges).expect("tree is valid")
}

pub fn tree_distances(n: usize) -> DistanceMatrix {
    binary_tree(n).distance_matrix().expect("tree is connected")
}
