//! Representation learning in products of constant-curvature manifolds.

pub mod cluster;
pub mod curvature;
pub mod embed;
pub mod error;
pub mod graph;
pub mod io;
pub mod kappa_models;
pub mod manifolds;
pub mod optim;
pub mod rng;
pub mod sampling;
pub mod stereographic;
pub mod trees;

pub use error::{Error, Result};
pub use graph::Graph;
pub use manifolds::{ComponentManifold, DistanceMatrix, Kind, Signature};
