//! Constant-curvature manifolds, their products, and distance matrices.

mod component;
mod product;

pub use component::{ComponentManifold, Kind, ANTIPODAL_TOL, CLAMP_BAND, CONSTRAINT_TOL, TANGENT_TOL};
pub use product::{PointReport, Signature};

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(Array2<f64>);

impl DistanceMatrix {
    /// Validates symmetry (relative 1e-9), zero diagonal, finiteness and nonnegativity.
    pub fn new(m: Array2<f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::InvalidDistanceMatrix(format!("matrix is {r}x{c}, not square")));
        }
        for i in 0..r {
            if m[[i, i]] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "diagonal entry ({i},{i}) is {}",
                    m[[i, i]]
                )));
            }
            for j in 0..r {
                let v = m[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!("entry ({i},{j}) is {v}")));
                }
                if j > i {
                    let w = m[[j, i]];
                    if (v - w).abs() > 1e-9 * v.abs().max(w.abs()).max(1.0) {
                        return Err(Error::InvalidDistanceMatrix(format!(
                            "entries ({i},{j})={v} and ({j},{i})={w} differ"
                        )));
                    }
                }
            }
        }
        Ok(Self(m))
    }

    /// Pairwise geodesic distances between the rows of `points`.
    pub fn from_points(sig: &Signature, points: ArrayView2<'_, f64>) -> Result<Self> {
        let pts = points.as_standard_layout();
        if pts.ncols() != sig.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), found: pts.ncols() });
        }
        for row in pts.rows() {
            sig.check_point(row.as_slice().unwrap())?;
        }
        let n = pts.nrows();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = pts.row(i);
                let xi = xi.as_slice().unwrap();
                (0..n).map(|j| if i == j { 0.0 } else { sig.dist_raw(xi, pts.row(j).as_slice().unwrap()) }).collect()
            })
            .collect();
        let mut m = Array2::zeros((n, n));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m[[i, j]] = v;
            }
        }
        // Symmetrize exactly; the per-pair formulas agree only to rounding.
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (m[[i, j]] + m[[j, i]]);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        Ok(Self(m))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[[i, j]]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Principal submatrix on the given indices.
    pub fn select(&self, idx: &[usize]) -> Self {
        let m = Array2::from_shape_fn((idx.len(), idx.len()), |(a, b)| self.0[[idx[a], idx[b]]]);
        Self(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_malformed_matrices() {
        assert!(DistanceMatrix::new(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[0.0, f64::NAN], [f64::NAN, 0.0]]).is_err());
        assert!(DistanceMatrix::new(Array2::zeros((2, 3))).is_err());
        assert!(DistanceMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).is_ok());
    }

    #[test]
    fn error_names_offending_entry() {
        let err = DistanceMatrix::new(array![[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 4.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("(1,2)"), "{err}");
    }

    #[test]
    fn from_points_is_symmetric() {
        let sig = Signature::parse("E2").unwrap();
        let pts = array![[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]];
        let d = DistanceMatrix::from_points(&sig, pts.view()).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(2, 2), 0.0);
    }
}
