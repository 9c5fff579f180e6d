use kappa_core::optim::RadanParams;
use ndarray::Array2;

/// Optimal memberships `1 / Σ_l (d_ij / d_il)^{2/(m−1)}`.
pub fn optimal_u(d: &Array2<f64>, m: f64) -> Array2<f64> {
    Array2::from_shape_fn(d.dim(), |(i, j)| {
        1.0 / (0..d.ncols()).map(|l| (d[[i, j]] / d[[i, l]]).powf(2.0 / (m - 1.0))).sum::<f64>()
    })
}

/// Scalar-second-moment Adan on flat space.
pub struct Adan {
    m: Vec<f64>,
    v: Vec<f64>,
    n: f64,
    prev: Vec<f64>,
    started: bool,
}

impl Adan {
    pub fn new() -> Self {
        Self { m: vec![], v: vec![], n: 0.0, prev: vec![], started: false }
    }

    pub fn step(&mut self, x: &mut [f64], g: &[f64], p: &RadanParams) {
        let sq = |a: &[f64]| a.iter().map(|v| v * v).sum::<f64>();
        if !self.started {
            self.m = g.to_vec();
            self.v = vec![0.0; g.len()];
            self.n = sq(g);
            self.started = true;
        } else {
            let diff: Vec<f64> = g.iter().zip(&self.prev).map(|(a, b)| a - b).collect();
            for i in 0..g.len() {
                self.m[i] = p.beta1 * self.m[i] + (1.0 - p.beta1) * g[i];
                self.v[i] = p.beta2 * self.v[i] + (1.0 - p.beta2) * diff[i];
            }
            let z: Vec<f64> = g.iter().zip(&diff).map(|(a, d)| a + p.beta2 * d).collect();
            self.n = p.beta3 * self.n + (1.0 - p.beta3) * sq(&z);
        }
        for i in 0..x.len() {
            x[i] -= p.lr * (self.m[i] + p.beta2 * self.v[i]) / (self.n.sqrt() + p.eps);
        }
        self.prev = g.to_vec();
    }
}
