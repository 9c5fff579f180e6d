//! Single constant-curvature manifolds in ambient coordinates.
//!
//! Hyperbolic components use the hyperboloid (Lorentz) model in `R^{d+1}`
//! with `<x, x>_L = 1/κ` and `x₀ > 0`; spherical components use the sphere of
//! radius `1/√κ` in `R^{d+1}`; Euclidean components are plain `R^d`.
//! With those conventions both curved kinds satisfy `κ<x, x> = 1`, which the
//! formulas below lean on heavily.

use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance for the manifold constraint of a point.
pub const CONSTRAINT_TOL: f64 = 1e-9;
/// Relative tolerance for tangency of a vector.
pub const TANGENT_TOL: f64 = 1e-8;
/// Band outside `[-1, 1]` (acos) or below `1` (acosh) that is clamped rather than rejected.
pub const CLAMP_BAND: f64 = 1e-9;
/// `1 + κ<x, y>` below this value marks a spherical pair as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-12;

/// Sign class of a constant-curvature manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl Kind {
    pub fn of(curvature: f64) -> Kind {
        if curvature < 0.0 {
            Kind::Hyperbolic
        } else if curvature > 0.0 {
            Kind::Spherical
        } else {
            Kind::Euclidean
        }
    }

    pub fn letter(self) -> char {
        match self {
            Kind::Hyperbolic => 'H',
            Kind::Euclidean => 'E',
            Kind::Spherical => 'S',
        }
    }
}

/// A `d`-dimensional manifold of constant curvature `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentManifold {
    curvature: f64,
    dim: usize,
}

impl ComponentManifold {
    pub fn new(curvature: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("manifold dimension must be positive"));
        }
        if !curvature.is_finite() {
            return Err(Error::invalid(format!("curvature must be finite, got {curvature}")));
        }
        Ok(Self { curvature, dim })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self { curvature: 0.0, dim: dim.max(1) }
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> Kind {
        Kind::of(self.curvature)
    }

    pub fn is_curved(&self) -> bool {
        self.curvature != 0.0
    }

    /// `d + 1` for curved components, `d` for Euclidean ones.
    pub fn ambient_dim(&self) -> usize {
        if self.is_curved() {
            self.dim + 1
        } else {
            self.dim
        }
    }

    /// `√|κ|`.
    pub fn scale(&self) -> f64 {
        self.curvature.abs().sqrt()
    }

    /// Same manifold with a different curvature of the same sign class.
    pub fn with_curvature(&self, curvature: f64) -> Result<Self> {
        if Kind::of(curvature) != self.kind() {
            return Err(Error::invalid(format!(
                "curvature {curvature} changes the sign class of {self}"
            )));
        }
        Self::new(curvature, self.dim)
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: v.len() });
        }
        Ok(())
    }

    /// Ambient inner product: Minkowski for hyperbolic components, dot product otherwise.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.inner_raw(u, v))
    }

    pub(crate) fn inner_raw(&self, u: &[f64], v: &[f64]) -> f64 {
        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        if self.kind() == Kind::Hyperbolic {
            dot - 2.0 * u[0] * v[0]
        } else {
            dot
        }
    }

    /// Norm of a tangent vector under the Riemannian metric.
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.inner_raw(v, v).max(0.0).sqrt()
    }

    /// Relative violation of the manifold constraint; `∞` for a point on the
    /// lower sheet of the hyperboloid.
    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        if x.len() != self.ambient_dim() || x.iter().any(|c| !c.is_finite()) {
            return f64::INFINITY;
        }
        match self.kind() {
            Kind::Euclidean => 0.0,
            Kind::Hyperbolic if x[0] <= 0.0 => f64::INFINITY,
            _ => {
                let k = self.curvature;
                let sq: f64 = x.iter().map(|c| c * c).sum();
                (k * self.inner_raw(x, x) - 1.0).abs() / (k.abs() * sq).max(1.0)
            }
        }
    }

    pub(crate) fn check_point_as(&self, x: &[f64], component: usize) -> Result<()> {
        self.check_len(x)?;
        let residual = self.constraint_residual(x);
        if residual > CONSTRAINT_TOL {
            return Err(Error::NotOnManifold { component, residual });
        }
        Ok(())
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.check_point_as(x, 0)
    }

    /// Relative violation of tangency of `v` at `x`.
    pub fn tangent_residual(&self, x: &[f64], v: &[f64]) -> f64 {
        if !self.is_curved() {
            return 0.0;
        }
        let s = self.scale();
        let nx = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let nv = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        s * self.inner_raw(x, v).abs() / (s * nx * nv).max(1.0)
    }

    pub(crate) fn check_tangent_as(&self, x: &[f64], v: &[f64], component: usize) -> Result<()> {
        self.check_len(v)?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotTangent { component, residual: f64::INFINITY });
        }
        let residual = self.tangent_residual(x, v);
        if residual > TANGENT_TOL {
            return Err(Error::NotTangent { component, residual });
        }
        Ok(())
    }

    /// `1 + κ<x, y>` computed without cancellation for nearby (hyperbolic) or
    /// nearly antipodal (spherical) pairs.
    fn one_plus_alpha(&self, x: &[f64], y: &[f64]) -> f64 {
        let k = self.curvature;
        match self.kind() {
            Kind::Spherical => {
                let s: f64 = x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum();
                0.5 * k * s
            }
            Kind::Hyperbolic => 2.0 + 0.5 * k.abs() * self.minkowski_gap(x, y),
            Kind::Euclidean => 2.0,
        }
    }

    /// `<x-y, x-y>_L`, clamped at zero.
    fn minkowski_gap(&self, x: &[f64], y: &[f64]) -> f64 {
        let w0 = x[0] - y[0];
        let rest: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (a - b) * (a - b)).sum();
        (rest - w0 * w0).max(0.0)
    }

    /// Geodesic distance between two points of this manifold.
    ///
    /// Hyperbolic: `acosh(κ<x, y>_L)/√|κ|`. Spherical: `acos(κ<x, y>)/√κ`.
    /// Arguments within [`CLAMP_BAND`] of the boundary are clamped; the value
    /// itself is evaluated through half-chord forms that stay accurate for
    /// nearby points.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        if self.is_curved() {
            let alpha = self.curvature * self.inner_raw(x, y);
            match self.kind() {
                Kind::Hyperbolic if alpha < 1.0 - CLAMP_BAND * alpha.abs().max(1.0) => {
                    return Err(Error::OutOfDomain { what: "acosh", value: alpha });
                }
                Kind::Spherical if alpha.abs() > 1.0 + CLAMP_BAND => {
                    return Err(Error::OutOfDomain { what: "acos", value: alpha });
                }
                _ => {}
            }
        }
        Ok(self.dist_raw(x, y))
    }

    pub(crate) fn dist_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind() {
            Kind::Euclidean => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Kind::Hyperbolic => {
                let c = self.scale();
                2.0 / c * (0.5 * c * self.minkowski_gap(x, y).sqrt()).asinh()
            }
            Kind::Spherical => {
                let (mut diff, mut sum) = (0.0, 0.0);
                for (a, b) in x.iter().zip(y) {
                    diff += (a - b) * (a - b);
                    sum += (a + b) * (a + b);
                }
                2.0 * diff.sqrt().atan2(sum.sqrt()) / self.scale()
            }
        }
    }

    /// Exponential map at `x` applied to the tangent vector `v`.
    pub fn exp_map(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_tangent_as(x, v, 0)?;
        Ok(self.exp_raw(x, v))
    }

    pub(crate) fn exp_raw(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let c = self.scale();
        let theta = c * self.norm(v);
        let out: Vec<f64> = match self.kind() {
            Kind::Euclidean => return x.iter().zip(v).map(|(a, b)| a + b).collect(),
            _ if theta < 1e-12 => x.iter().zip(v).map(|(a, b)| a + b).collect(),
            Kind::Hyperbolic => {
                let (ch, sh) = (theta.cosh(), theta.sinh() / theta);
                x.iter().zip(v).map(|(a, b)| ch * a + sh * b).collect()
            }
            Kind::Spherical => {
                let (co, si) = (theta.cos(), theta.sin() / theta);
                x.iter().zip(v).map(|(a, b)| co * a + si * b).collect()
            }
        };
        self.project_raw(out)
    }

    /// Logarithmic map: the tangent vector at `x` whose exponential is `y`.
    pub fn log_map(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.log_raw(x, y)
    }

    pub(crate) fn log_raw(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let k = self.curvature;
        let c = self.scale();
        let (alpha_minus_one, ratio) = match self.kind() {
            Kind::Euclidean => return Ok(y.iter().zip(x).map(|(a, b)| a - b).collect()),
            Kind::Hyperbolic => {
                let t = c * self.dist_raw(x, y);
                let ratio = if t < 1e-8 { 1.0 - t * t / 6.0 } else { t / t.sinh() };
                (0.5 * k.abs() * self.minkowski_gap(x, y), ratio)
            }
            Kind::Spherical => {
                if self.one_plus_alpha(x, y) < ANTIPODAL_TOL {
                    return Err(Error::Antipodal("logarithmic map"));
                }
                let t = c * self.dist_raw(x, y);
                let ratio = if t < 1e-8 { 1.0 + t * t / 6.0 } else { t / t.sin() };
                let chord: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-0.5 * k * chord, ratio)
            }
        };
        // u = y - κ<x,y> x = (y - x) - (κ<x,y> - 1) x has Riemannian norm sinh(t)/c (sin for spheres).
        let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| (b - a) - alpha_minus_one * a).collect();
        let log: Vec<f64> = u.into_iter().map(|w| ratio * w).collect();
        Ok(self.project_tangent(x, &log))
    }

    /// Parallel transport of `v` from `T_x` to `T_y` along the connecting geodesic.
    pub fn parallel_transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_tangent_as(x, v, 0)?;
        self.transport_raw(x, y, v)
    }

    pub(crate) fn transport_raw(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if !self.is_curved() {
            return Ok(v.to_vec());
        }
        let denom = self.one_plus_alpha(x, y);
        if denom < ANTIPODAL_TOL {
            return Err(Error::Antipodal("parallel transport"));
        }
        let coeff = self.curvature * self.inner_raw(y, v) / denom;
        Ok(v.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| w - coeff * (a + b)).collect())
    }

    /// Converts the Euclidean gradient of an ambient extension into the Riemannian gradient.
    ///
    /// Hyperbolic: flip the time coordinate, then project onto `T_x`.
    /// Spherical: project onto `T_x`. Euclidean: identity.
    pub fn egrad_to_rgrad(&self, x: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_len(g)?;
        Ok(self.egrad_to_rgrad_raw(x, g))
    }

    pub(crate) fn egrad_to_rgrad_raw(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        match self.kind() {
            Kind::Euclidean => g.to_vec(),
            Kind::Spherical => self.project_tangent(x, g),
            Kind::Hyperbolic => {
                let mut h = g.to_vec();
                h[0] = -h[0];
                self.project_tangent(x, &h)
            }
        }
    }

    /// Orthogonal projection onto `T_x` under the ambient inner product.
    pub fn project_tangent(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        if !self.is_curved() {
            return v.to_vec();
        }
        let coeff = self.curvature * self.inner_raw(x, v);
        v.iter().zip(x).map(|(w, a)| w - coeff * a).collect()
    }

    /// Euclidean (ambient) gradient of `δ(x, y)²` with respect to `x`.
    ///
    /// Projected through [`Self::egrad_to_rgrad`] this equals `-2 log_x(y)`.
    pub fn sq_dist_egrad(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let c = self.scale();
        match self.kind() {
            Kind::Euclidean => Ok(x.iter().zip(y).map(|(a, b)| 2.0 * (a - b)).collect()),
            Kind::Hyperbolic => {
                let t = c * self.dist_raw(x, y);
                let r = if t < 1e-8 { 1.0 - t * t / 6.0 } else { t / t.sinh() };
                let mut g: Vec<f64> = y.iter().map(|b| -2.0 * r * b).collect();
                g[0] = -g[0];
                Ok(g)
            }
            Kind::Spherical => {
                if self.one_plus_alpha(x, y) < ANTIPODAL_TOL {
                    return Err(Error::Antipodal("squared-distance gradient"));
                }
                let t = c * self.dist_raw(x, y);
                let r = if t < 1e-8 { 1.0 + t * t / 6.0 } else { t / t.sin() };
                Ok(y.iter().map(|b| -2.0 * r * b).collect())
            }
        }
    }

    /// `(1/√|κ|, 0, …, 0)` for curved components, the zero vector otherwise.
    pub fn origin(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.ambient_dim()];
        if self.is_curved() {
            o[0] = 1.0 / self.scale();
        }
        o
    }

    /// Nearest constraint-satisfying point: radial rescale on spheres, rescale
    /// to the upper sheet on hyperboloids (falling back to lifting the spatial
    /// part when the input is not timelike).
    pub fn project_to_manifold(&self, ambient: &[f64]) -> Result<Vec<f64>> {
        self.check_len(ambient)?;
        if ambient.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("cannot project a non-finite vector"));
        }
        match self.kind() {
            Kind::Euclidean => Ok(ambient.to_vec()),
            Kind::Spherical => {
                let n = ambient.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n < 1e-300 {
                    return Err(Error::invalid("cannot project the zero vector onto a sphere"));
                }
                let s = 1.0 / (self.scale() * n);
                Ok(ambient.iter().map(|c| c * s).collect())
            }
            Kind::Hyperbolic => {
                let q = self.inner_raw(ambient, ambient);
                if ambient[0] > 0.0 && q < 0.0 {
                    let s = 1.0 / (self.scale() * (-q).sqrt());
                    Ok(ambient.iter().map(|c| c * s).collect())
                } else {
                    Ok(self.project_raw(ambient.to_vec()))
                }
            }
        }
    }

    /// Cheap re-projection used after every update to stop numerical drift.
    pub(crate) fn project_raw(&self, mut x: Vec<f64>) -> Vec<f64> {
        match self.kind() {
            Kind::Euclidean => {}
            Kind::Hyperbolic => {
                let rest: f64 = x[1..].iter().map(|c| c * c).sum();
                x[0] = (1.0 / self.curvature.abs() + rest).sqrt();
            }
            Kind::Spherical => {
                let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 0.0 {
                    let s = 1.0 / (self.scale() * n);
                    x.iter_mut().for_each(|c| *c *= s);
                }
            }
        }
        x
    }
}

impl fmt::Display for ComponentManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Euclidean => write!(f, "E{}", self.dim),
            k => write!(f, "{}{}@{}", k.letter(), self.dim, self.curvature),
        }
    }
}
