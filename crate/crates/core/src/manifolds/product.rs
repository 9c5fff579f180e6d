//! Cartesian products of constant-curvature components.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use super::component::{ComponentManifold, Kind, CONSTRAINT_TOL};
use crate::error::{Error, Result};

/// Ordered, non-empty list of components. Points are flat ambient vectors in
/// which each component occupies a contiguous block.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    components: Vec<ComponentManifold>,
    offsets: Vec<usize>,
}

/// Outcome of [`Signature::validate_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub residuals: Vec<f64>,
}

impl PointReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| *r <= CONSTRAINT_TOL)
    }

    /// Index of the first component whose residual exceeds tolerance.
    pub fn first_failure(&self) -> Option<usize> {
        self.residuals.iter().position(|r| !(*r <= CONSTRAINT_TOL))
    }
}

impl Signature {
    pub fn new(components: Vec<ComponentManifold>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("signature must have at least one component"));
        }
        let mut offsets = Vec::with_capacity(components.len() + 1);
        offsets.push(0);
        for c in &components {
            offsets.push(offsets.last().unwrap() + c.ambient_dim());
        }
        Ok(Self { components, offsets })
    }

    /// Builds a signature from `(κ, d)` pairs.
    pub fn from_pairs(pairs: &[(f64, usize)]) -> Result<Self> {
        let comps = pairs
            .iter()
            .map(|&(k, d)| ComponentManifold::new(k, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// Parses the compact form `H2@-1,E2,S4@0.5`: a kind letter, the
    /// dimension, and for curved kinds `@κ` with a matching sign. Curved kinds
    /// default to `κ = ∓1` when the curvature is omitted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for raw in text.split(',') {
            let tok = raw.trim();
            if tok.is_empty() {
                return Err(Error::SignatureSyntax(format!("empty component in {text:?}")));
            }
            let mut chars = tok.chars();
            let letter = chars.next().unwrap().to_ascii_uppercase();
            let rest = chars.as_str();
            let (dim_s, k_s) = match rest.split_once('@') {
                Some((d, k)) => (d, Some(k)),
                None => (rest, None),
            };
            let dim: usize = dim_s
                .parse()
                .map_err(|_| Error::SignatureSyntax(format!("bad dimension in {tok:?}")))?;
            if dim == 0 {
                return Err(Error::SignatureSyntax(format!("zero dimension in {tok:?}")));
            }
            let k = match k_s {
                Some(s) => Some(
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|k| k.is_finite())
                        .ok_or_else(|| Error::SignatureSyntax(format!("bad curvature in {tok:?}")))?,
                ),
                None => None,
            };
            let k = match (letter, k) {
                ('H', None) => -1.0,
                ('S', None) => 1.0,
                ('E', None) => 0.0,
                ('H', Some(k)) if k < 0.0 => k,
                ('S', Some(k)) if k > 0.0 => k,
                ('E', Some(k)) if k == 0.0 => k,
                ('H' | 'S' | 'E', Some(k)) => {
                    return Err(Error::SignatureSyntax(format!(
                        "curvature {k} has the wrong sign for {letter} in {tok:?}"
                    )))
                }
                _ => return Err(Error::SignatureSyntax(format!("unknown kind {letter:?} in {tok:?}"))),
            };
            comps.push(ComponentManifold::new(k, dim)?);
        }
        Self::new(comps)
    }

    /// Header form used in embedding files: `[(-1,2),(0,3)]`.
    pub fn to_pairs_string(&self) -> String {
        let parts: Vec<String> =
            self.components.iter().map(|c| format!("({},{})", c.curvature(), c.dim())).collect();
        format!("[{}]", parts.join(","))
    }

    /// Inverse of [`Self::to_pairs_string`]; whitespace is ignored.
    pub fn parse_pairs(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::SignatureSyntax(format!("expected [..] in {text:?}")))?;
        let mut pairs = Vec::new();
        for chunk in inner.split("),") {
            let body = chunk.trim_start_matches('(').trim_end_matches(')');
            let (k, d) = body
                .split_once(',')
                .ok_or_else(|| Error::SignatureSyntax(format!("expected (kappa,dim) in {text:?}")))?;
            let k: f64 = k.parse().map_err(|_| Error::SignatureSyntax(format!("bad curvature {k:?}")))?;
            let d: usize = d.parse().map_err(|_| Error::SignatureSyntax(format!("bad dimension {d:?}")))?;
            pairs.push((k, d));
        }
        Self::from_pairs(&pairs)
    }

    pub fn components(&self) -> &[ComponentManifold] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.components.iter().map(|c| c.dim()).sum()
    }

    /// Coordinate range of component `i` inside a flat point.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn curvatures(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.curvature()).collect()
    }

    /// Same layout with new curvatures; each must keep its component's sign.
    pub fn with_curvatures(&self, curvatures: &[f64]) -> Result<Self> {
        if curvatures.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: curvatures.len() });
        }
        let comps = self
            .components
            .iter()
            .zip(curvatures)
            .map(|(c, &k)| c.with_curvature(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// Appends one component.
    pub fn extended(&self, extra: ComponentManifold) -> Self {
        let mut comps = self.components.clone();
        comps.push(extra);
        Self::new(comps).expect("non-empty")
    }

    /// The power manifold `self^n` (components repeated in order).
    pub fn repeat(&self, n: usize) -> Result<Self> {
        let comps: Vec<_> = (0..n).flat_map(|_| self.components.iter().copied()).collect();
        Self::new(comps)
    }

    /// Iterator over `(component, slice)` pairs of a flat vector.
    pub fn split<'a>(&'a self, v: &'a [f64]) -> impl Iterator<Item = (&'a ComponentManifold, &'a [f64])> + 'a {
        self.components.iter().enumerate().map(move |(i, c)| (c, &v[self.range(i)]))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: v.len() });
        }
        Ok(())
    }

    pub fn validate_point(&self, x: &[f64]) -> Result<PointReport> {
        self.check_len(x)?;
        Ok(PointReport { residuals: self.split(x).map(|(c, xi)| c.constraint_residual(xi)).collect() })
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.check_len(x)?;
        for (i, (c, xi)) in self.split(x).enumerate() {
            c.check_point_as(xi, i)?;
        }
        Ok(())
    }

    pub fn check_tangent(&self, x: &[f64], v: &[f64]) -> Result<()> {
        self.check_len(v)?;
        for (i, c) in self.components.iter().enumerate() {
            let r = self.range(i);
            c.check_tangent_as(&x[r.clone()], &v[r], i)?;
        }
        Ok(())
    }

    pub fn origin(&self) -> Vec<f64> {
        self.components.iter().flat_map(|c| c.origin()).collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.inner_raw(u, v))
    }

    pub(crate) fn inner_raw(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.len()).map(|i| self.components[i].inner_raw(&u[self.range(i)], &v[self.range(i)])).sum()
    }

    /// Riemannian norm of a tangent vector.
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.split(v).map(|(c, vi)| c.inner_raw(vi, vi).max(0.0)).sum::<f64>().sqrt()
    }

    /// Per-component geodesic distances.
    pub fn component_distances(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        self.check_len(y)?;
        (0..self.len())
            .map(|i| {
                let r = self.range(i);
                let c = &self.components[i];
                c.check_point_as(&x[r.clone()], i)?;
                c.check_point_as(&y[r.clone()], i)?;
                c.distance(&x[r.clone()], &y[r])
            })
            .collect()
    }

    /// `√Σ δᵢ²` over components.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.component_distances(x, y)?.iter().map(|d| d * d).sum::<f64>().sqrt())
    }

    pub(crate) fn component_sq_dists_raw(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let r = self.range(i);
            let d = self.components[i].dist_raw(&x[r.clone()], &y[r]);
            *o = d * d;
        }
    }

    pub(crate) fn dist_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.len())
            .map(|i| {
                let d = self.components[i].dist_raw(&x[self.range(i)], &y[self.range(i)]);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn exp_map(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_tangent(x, v)?;
        Ok(self.exp_raw(x, v))
    }

    pub(crate) fn exp_raw(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for i in 0..self.len() {
            let r = self.range(i);
            out.extend(self.components[i].exp_raw(&x[r.clone()], &v[r]));
        }
        out
    }

    pub fn log_map(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.log_raw(x, y)
    }

    pub(crate) fn log_raw(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for i in 0..self.len() {
            let r = self.range(i);
            out.extend(self.components[i].log_raw(&x[r.clone()], &y[r])?);
        }
        Ok(out)
    }

    pub fn parallel_transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_tangent(x, v)?;
        self.transport_raw(x, y, v)
    }

    pub(crate) fn transport_raw(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for i in 0..self.len() {
            let r = self.range(i);
            out.extend(self.components[i].transport_raw(&x[r.clone()], &y[r.clone()], &v[r])?);
        }
        Ok(out)
    }

    pub fn egrad_to_rgrad(&self, x: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_len(g)?;
        Ok(self.egrad_to_rgrad_raw(x, g))
    }

    pub(crate) fn egrad_to_rgrad_raw(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for i in 0..self.len() {
            let r = self.range(i);
            out.extend(self.components[i].egrad_to_rgrad_raw(&x[r.clone()], &g[r]));
        }
        out
    }

    pub fn project_to_manifold(&self, ambient: &[f64]) -> Result<Vec<f64>> {
        self.check_len(ambient)?;
        let mut out = Vec::with_capacity(ambient.len());
        for (c, a) in self.split(ambient) {
            out.extend(c.project_to_manifold(a)?);
        }
        Ok(out)
    }

    /// True when every component is Euclidean.
    pub fn is_flat(&self) -> bool {
        self.components.iter().all(|c| c.kind() == Kind::Euclidean)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
