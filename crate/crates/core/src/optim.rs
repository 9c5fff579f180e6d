//! Riemannian gradient descent and the Radan optimizer.

use crate::error::{Error, Result};
use crate::manifolds::Signature;

/// One Riemannian SGD step: convert the Euclidean gradient, then follow the
/// geodesic in the descent direction.
pub fn rsgd_step(sig: &Signature, x: &[f64], egrad: &[f64], lr: f64) -> Result<Vec<f64>> {
    sig.check_point(x)?;
    if egrad.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: egrad.len() });
    }
    if egrad.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("gradient contains non-finite entries"));
    }
    Ok(rsgd_step_raw(sig, x, egrad, lr))
}

pub(crate) fn rsgd_step_raw(sig: &Signature, x: &[f64], egrad: &[f64], lr: f64) -> Vec<f64> {
    let g = sig.egrad_to_rgrad_raw(x, egrad);
    let step: Vec<f64> = g.iter().map(|v| -lr * v).collect();
    sig.exp_raw(x, &step)
}

/// Learning-rate schedule with a low-rate burn-in phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsgdConfig {
    pub burn_in_lr: f64,
    pub train_lr: f64,
    pub burn_in_epochs: usize,
    pub total_epochs: usize,
}

impl RsgdConfig {
    /// Burn-in covers 10% of the epochs at a tenth of the learning rate.
    pub fn with_defaults(lr: f64, total_epochs: usize) -> Self {
        Self { burn_in_lr: lr / 10.0, train_lr: lr, burn_in_epochs: total_epochs / 10, total_epochs }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in_epochs > self.total_epochs {
            return Err(Error::invalid("burn-in epochs exceed total epochs"));
        }
        if !(self.burn_in_lr > 0.0 && self.train_lr > 0.0) {
            return Err(Error::invalid("learning rates must be positive"));
        }
        Ok(())
    }

    pub fn lr_at(&self, epoch: usize) -> f64 {
        if epoch < self.burn_in_epochs {
            self.burn_in_lr
        } else {
            self.train_lr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadanParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub eps: f64,
}

impl Default for RadanParams {
    fn default() -> Self {
        Self { lr: 0.01, beta1: 0.98, beta2: 0.92, beta3: 0.99, eps: 1e-8 }
    }
}

/// Moments of Radan, always based at the current iterate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadanState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub n: f64,
    pub prev_grad: Vec<f64>,
    pub step_count: usize,
}

/// One Radan step from `x` with Riemannian gradient `g` (tangent at `x`).
/// The stored moments are transported to the returned point.
pub fn radan_step(
    sig: &Signature,
    state: &mut RadanState,
    x: &[f64],
    g: &[f64],
    p: &RadanParams,
) -> Result<Vec<f64>> {
    if g.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: g.len() });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("gradient contains non-finite entries"));
    }
    let gn2 = sig.inner_raw(g, g).max(0.0);
    if state.step_count == 0 {
        state.m = g.to_vec();
        state.v = vec![0.0; g.len()];
        state.n = gn2;
    } else {
        let diff: Vec<f64> = g.iter().zip(&state.prev_grad).map(|(a, b)| a - b).collect();
        for i in 0..g.len() {
            state.m[i] = p.beta1 * state.m[i] + (1.0 - p.beta1) * g[i];
            state.v[i] = p.beta2 * state.v[i] + (1.0 - p.beta2) * diff[i];
        }
        let z: Vec<f64> = g.iter().zip(&diff).map(|(a, d)| a + p.beta2 * d).collect();
        state.n = p.beta3 * state.n + (1.0 - p.beta3) * sig.inner_raw(&z, &z).max(0.0);
    }
    let u: Vec<f64> = state.m.iter().zip(&state.v).map(|(m, v)| m + p.beta2 * v).collect();
    let denom = state.n.sqrt() + p.eps;
    let next = if u.iter().all(|v| *v == 0.0) {
        x.to_vec()
    } else {
        if !(denom > 0.0) {
            return Err(Error::invalid("Radan second moment underflowed to zero"));
        }
        let alpha = p.lr / denom;
        let step: Vec<f64> = u.iter().map(|v| -alpha * v).collect();
        sig.exp_raw(x, &step)
    };
    state.m = sig.transport_raw(x, &next, &state.m)?;
    state.v = sig.transport_raw(x, &next, &state.v)?;
    state.prev_grad = sig.transport_raw(x, &next, g)?;
    state.step_count += 1;
    Ok(next)
}
