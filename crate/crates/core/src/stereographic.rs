//! The κ-stereographic model and its gyrovector algebra.
//!
//! Points are plain `&[f64]` slices of intrinsic dimension `d`; every
//! function takes the curvature explicitly. The curvature-aware tangent is
//! `tan_κ(u) = tan(√κ u)/√κ` for `κ > 0`, `tanh(√|κ| u)/√|κ|` for `κ < 0` and
//! the identity at `κ = 0`.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::manifolds::{ComponentManifold, Kind, Signature};

/// Norms below this are treated as zero.
const ZERO_NORM: f64 = 1e-15;
/// Gyro-denominators below this are singular.
const SINGULAR: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn tan_k(u: f64, kappa: f64) -> f64 {
    let c = kappa.abs().sqrt();
    if kappa > 0.0 {
        (c * u).tan() / c
    } else if kappa < 0.0 {
        (c * u).tanh() / c
    } else {
        u
    }
}

pub fn artan_k(y: f64, kappa: f64) -> f64 {
    let c = kappa.abs().sqrt();
    if kappa > 0.0 {
        (c * y).atan() / c
    } else if kappa < 0.0 {
        // Points on or past the boundary are out of domain; saturate rather than produce NaN.
        (c * y).min(1.0 - 1e-16).atanh() / c
    } else {
        y
    }
}

/// Conformal factor `λ_x = 2 / (1 + κ‖x‖²)`.
pub fn conformal_factor(x: &[f64], kappa: f64) -> f64 {
    2.0 / (1.0 + kappa * dot(x, x))
}

/// Checks `1 + κ‖x‖² > 1e-12`.
pub fn check_domain(x: &[f64], kappa: f64) -> Result<()> {
    let m = 1.0 + kappa * dot(x, x);
    if !(m > SINGULAR) || x.iter().any(|c| !c.is_finite()) {
        return Err(Error::OutOfDomain { what: "stereographic point (1 + κ‖x‖²)", value: m });
    }
    Ok(())
}

/// Stereographic projection `ρ_κ` of an ambient point of `m`.
pub fn stereo_project(m: &ComponentManifold, x: &[f64]) -> Result<Vec<f64>> {
    m.check_point(x)?;
    if m.kind() == Kind::Euclidean {
        return Ok(x.to_vec());
    }
    let denom = 1.0 + m.scale() * x[0];
    if denom.abs() < SINGULAR {
        return Err(Error::Singular("stereographic projection from the pole"));
    }
    Ok(scaled(&x[1..], 1.0 / denom))
}

/// Inverse projection `ρ_κ⁻¹` back to ambient coordinates.
pub fn stereo_unproject(m: &ComponentManifold, s: &[f64]) -> Result<Vec<f64>> {
    if s.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: s.len() });
    }
    let k = m.curvature();
    check_domain(s, k)?;
    if m.kind() == Kind::Euclidean {
        return Ok(s.to_vec());
    }
    let sq = k * dot(s, s);
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push((1.0 - sq) / (m.scale() * (1.0 + sq)));
    out.extend(s.iter().map(|v| 2.0 * v / (1.0 + sq)));
    Ok(out)
}

/// Möbius (gyro) addition `x ⊕_κ y`.
pub fn mobius_add(x: &[f64], y: &[f64], kappa: f64) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let xy = dot(x, y);
    let x2 = dot(x, x);
    let y2 = dot(y, y);
    let denom = 1.0 - 2.0 * kappa * xy + kappa * kappa * x2 * y2;
    if denom.abs() < SINGULAR {
        return Err(Error::Singular("gyro-addition denominator vanishes"));
    }
    let a = (1.0 - 2.0 * kappa * xy - kappa * y2) / denom;
    let b = (1.0 + kappa * x2) / denom;
    Ok(x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
}

/// Scalar gyro-multiplication `s ⊗_κ x`.
pub fn kappa_scale(s: f64, x: &[f64], kappa: f64) -> Vec<f64> {
    let n = norm(x);
    if n < ZERO_NORM {
        return vec![0.0; x.len()];
    }
    scaled(x, tan_k(s * artan_k(n, kappa), kappa) / n)
}

/// Exponential map at the origin.
pub fn exp0(v: &[f64], kappa: f64) -> Vec<f64> {
    let n = norm(v);
    if n < ZERO_NORM {
        return v.to_vec();
    }
    scaled(v, tan_k(n, kappa) / n)
}

/// Logarithmic map at the origin.
pub fn log0(y: &[f64], kappa: f64) -> Vec<f64> {
    let n = norm(y);
    if n < ZERO_NORM {
        return y.to_vec();
    }
    scaled(y, artan_k(n, kappa) / n)
}

/// Row-wise `x ⊗_κ W = exp₀(log₀(x) W)`.
pub fn right_matmul(x: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>, kappa: f64) -> Result<Array2<f64>> {
    if x.ncols() != w.nrows() {
        return Err(Error::DimensionMismatch { expected: w.nrows(), found: x.ncols() });
    }
    let xw = x.dot(&w);
    let mut out = Array2::zeros(xw.dim());
    for (i, row) in x.rows().into_iter().enumerate() {
        let nx = row.dot(&row).sqrt();
        let r = xw.row(i);
        let nxw = r.dot(&r).sqrt();
        if nx < ZERO_NORM || nxw < ZERO_NORM {
            continue;
        }
        let f = tan_k(nxw / nx * artan_k(nx, kappa), kappa) / nxw;
        out.row_mut(i).assign(&r.mapv(|v| v * f));
    }
    Ok(out)
}

/// Weighted gyromidpoint of the rows of `x`.
pub fn gyromidpoint(a: &[f64], x: ArrayView2<'_, f64>, kappa: f64) -> Result<Vec<f64>> {
    if a.len() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: a.len() });
    }
    let lambdas: Vec<f64> = x.rows().into_iter().map(|r| 2.0 / (1.0 + kappa * r.dot(&r))).collect();
    let denom: f64 = a.iter().zip(&lambdas).map(|(ai, l)| ai * (l - 1.0)).sum();
    let scale: f64 = a.iter().map(|ai| ai.abs()).sum::<f64>().max(1.0);
    if denom.abs() < SINGULAR * scale {
        return Err(Error::Singular("gyromidpoint weights are degenerate"));
    }
    let mut acc = vec![0.0; x.ncols()];
    for ((ai, l), row) in a.iter().zip(&lambdas).zip(x.rows()) {
        let w = ai * l / denom;
        if w != 0.0 {
            acc.iter_mut().zip(row).for_each(|(s, v)| *s += w * v);
        }
    }
    Ok(kappa_scale(0.5, &acc, kappa))
}

/// Row `i` is `(Σⱼ Aᵢⱼ) ⊗_κ gyromidpoint(Aᵢ, X)`; at `κ = 0` this is exactly `A X`.
pub fn left_matmul(a: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>, kappa: f64) -> Result<Array2<f64>> {
    if a.ncols() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: a.ncols() });
    }
    let mut out = Array2::zeros((a.nrows(), x.ncols()));
    for (i, row) in a.rows().into_iter().enumerate() {
        let total: f64 = row.sum();
        if total == 0.0 && row.iter().all(|v| *v == 0.0) {
            continue;
        }
        let weights: Vec<f64> = row.to_vec();
        let mid = gyromidpoint(&weights, x, kappa)?;
        let v = kappa_scale(total, &mid, kappa);
        out.row_mut(i).assign(&ndarray::ArrayView1::from(&v));
    }
    Ok(out)
}

/// Geodesic distance `2 artan_κ ‖−x ⊕_κ y‖`.
pub fn stereo_dist(x: &[f64], y: &[f64], kappa: f64) -> Result<f64> {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let w = mobius_add(&neg, y, kappa)?;
    Ok(2.0 * artan_k(norm(&w), kappa))
}

pub fn stereo_exp(x: &[f64], v: &[f64], kappa: f64) -> Result<Vec<f64>> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: v.len() });
    }
    let n = norm(v);
    if n < ZERO_NORM {
        return Ok(x.to_vec());
    }
    let lam = conformal_factor(x, kappa);
    let step = scaled(v, tan_k(lam * n / 2.0, kappa) / n);
    mobius_add(x, &step, kappa)
}

pub fn stereo_log(x: &[f64], y: &[f64], kappa: f64) -> Result<Vec<f64>> {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let w = mobius_add(&neg, y, kappa).map_err(|e| match e {
        Error::Singular(_) if kappa > 0.0 => Error::Antipodal("stereographic logarithmic map"),
        e => e,
    })?;
    let n = norm(&w);
    if n < ZERO_NORM {
        return Ok(vec![0.0; x.len()]);
    }
    let lam = conformal_factor(x, kappa);
    Ok(scaled(&w, 2.0 / lam * artan_k(n, kappa) / n))
}

/// Signed hyperplane distance logit for one component.
///
/// `a` is the hyperplane normal and `p` its offset point; with
/// `z = −p ⊕ x` the value is
/// `λ_p‖a‖/√|κ| · asin_κ(2√|κ|⟨z,a⟩ / ((1+κ‖z‖²)‖a‖))`, with `asin_κ` the
/// arcsine for `κ > 0` and the inverse hyperbolic sine for `κ < 0`.
pub fn stereo_logits(x: &[f64], a: &[f64], p: &[f64], kappa: f64) -> Result<f64> {
    Ok(logit_parts(x, a, p, kappa)?.0)
}

/// Returns the logit and `⟨z, a⟩`.
fn logit_parts(x: &[f64], a: &[f64], p: &[f64], kappa: f64) -> Result<(f64, f64)> {
    if a.len() != x.len() || p.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: a.len().min(p.len()) });
    }
    let na = norm(a);
    if na < ZERO_NORM {
        return Err(Error::invalid("hyperplane normal must be nonzero"));
    }
    let neg_p: Vec<f64> = p.iter().map(|v| -v).collect();
    let z = mobius_add(&neg_p, x, kappa)?;
    if norm(&z) < ZERO_NORM {
        return Ok((0.0, 0.0));
    }
    let za = dot(&z, a);
    let lam = conformal_factor(p, kappa);
    let denom = 1.0 + kappa * dot(&z, &z);
    if kappa.abs() < 1e-8 {
        // First-order limit: asin_κ(u) ≈ u.
        return Ok((2.0 * lam * za / denom, za));
    }
    let c = kappa.abs().sqrt();
    let arg = 2.0 * c * za / (denom * na);
    let inv = if kappa > 0.0 { arg.clamp(-1.0, 1.0).asin() } else { arg.asinh() };
    Ok((lam * na / c * inv, za))
}

/// Aggregated logit on a product: `√(Σ logit²) · sign(Σ⟨z, a⟩)`.
pub fn product_logits(
    sig: &StereoProduct,
    x: &[f64],
    a: &[f64],
    p: &[f64],
) -> Result<f64> {
    let mut sq = 0.0;
    let mut inner = 0.0;
    for (i, k) in sig.curvatures.iter().enumerate() {
        let r = sig.range(i);
        let (l, za) = logit_parts(&x[r.clone()], &a[r.clone()], &p[r], *k)?;
        sq += l * l;
        inner += za;
    }
    let sign = if inner > 0.0 {
        1.0
    } else if inner < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(sq.sqrt() * sign)
}

/// Block layout of a product in stereographic coordinates: component `i`
/// occupies `dim_i` contiguous entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoProduct {
    pub curvatures: Vec<f64>,
    offsets: Vec<usize>,
    signature: Signature,
}

impl StereoProduct {
    pub fn new(signature: &Signature) -> Self {
        let mut offsets = vec![0];
        for c in signature.components() {
            offsets.push(offsets.last().unwrap() + c.dim());
        }
        Self { curvatures: signature.curvatures(), offsets, signature: signature.clone() }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.curvatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curvatures.is_empty()
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Projects an ambient product point componentwise.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.signature.check_point(x)?;
        let mut out = Vec::with_capacity(self.dim());
        for (c, xi) in self.signature.split(x) {
            out.extend(stereo_project(c, xi)?);
        }
        Ok(out)
    }

    pub fn unproject(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: s.len() });
        }
        let mut out = Vec::with_capacity(self.signature.ambient_dim());
        for (i, c) in self.signature.components().iter().enumerate() {
            out.extend(stereo_unproject(c, &s[self.range(i)])?);
        }
        Ok(out)
    }

    /// Projects every row of an ambient point set.
    pub fn project_rows(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((x.nrows(), self.dim()));
        for (i, row) in x.rows().into_iter().enumerate() {
            let p = self.project(&row.to_vec())?;
            out.row_mut(i).assign(&ndarray::ArrayView1::from(&p));
        }
        Ok(out)
    }

    /// Applies a per-component map to every row.
    pub fn map_rows<F>(&self, x: ArrayView2<'_, f64>, mut f: F) -> Result<Array2<f64>>
    where
        F: FnMut(&[f64], f64) -> Result<Vec<f64>>,
    {
        let mut out = Array2::zeros(x.dim());
        for (i, row) in x.rows().into_iter().enumerate() {
            let row = row.to_vec();
            for (c, k) in self.curvatures.iter().enumerate() {
                let r = self.range(c);
                let v = f(&row[r.clone()], *k)?;
                out.row_mut(i).slice_mut(ndarray::s![r]).assign(&ndarray::ArrayView1::from(&v));
            }
        }
        Ok(out)
    }

    /// Per-component left multiplication.
    pub fn left_matmul(&self, a: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((a.nrows(), self.dim()));
        for (c, k) in self.curvatures.iter().enumerate() {
            let r = self.range(c);
            let block = left_matmul(a, x.slice(ndarray::s![.., r.clone()]), *k)?;
            out.slice_mut(ndarray::s![.., r]).assign(&block);
        }
        Ok(out)
    }

    pub fn mobius_add(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for (c, k) in self.curvatures.iter().enumerate() {
            let r = self.range(c);
            out.extend(mobius_add(&x[r.clone()], &y[r], *k)?);
        }
        Ok(out)
    }

    pub fn exp0(&self, v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        for (c, k) in self.curvatures.iter().enumerate() {
            out.extend(exp0(&v[self.range(c)], *k));
        }
        out
    }

    pub fn log0(&self, y: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(y.len());
        for (c, k) in self.curvatures.iter().enumerate() {
            out.extend(log0(&y[self.range(c)], *k));
        }
        out
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut s = 0.0;
        for (c, k) in self.curvatures.iter().enumerate() {
            let r = self.range(c);
            let d = stereo_dist(&x[r.clone()], &y[r], *k)?;
            s += d * d;
        }
        Ok(s.sqrt())
    }

    pub fn exp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for (c, k) in self.curvatures.iter().enumerate() {
            let r = self.range(c);
            out.extend(stereo_exp(&x[r.clone()], &v[r], *k)?);
        }
        Ok(out)
    }

    /// Per-coordinate conformal factors (constant within a component).
    pub fn conformal_factors(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for (c, k) in self.curvatures.iter().enumerate() {
            let r = self.range(c);
            let l = conformal_factor(&x[r.clone()], *k);
            out.extend(std::iter::repeat(l).take(r.len()));
        }
        out
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        for (c, k) in self.curvatures.iter().enumerate() {
            check_domain(&x[self.range(c)], *k)?;
        }
        Ok(())
    }
}
