use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Design points `X_1..X_n` in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    intrinsic_dim: Option<usize>,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into rows of length {dim}",
                coords.len()
            )));
        }
        if coords.len() / dim < 2 {
            return Err(Error::invalid("a point cloud needs at least two points"));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate in point {} (column {})",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            coords,
            dim,
            intrinsic_dim: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::invalid(format!(
                "row {bad} has {} columns, expected {dim}",
                rows[bad].len()
            )));
        }
        Self::new(rows.concat(), dim)
    }

    /// Marks the cloud as sampled from an `m`-dimensional manifold.
    pub fn with_intrinsic_dim(mut self, m: usize) -> Result<Self> {
        if m == 0 || m > self.dim {
            return Err(Error::invalid(format!(
                "intrinsic dimension {m} must lie in 1..={}",
                self.dim
            )));
        }
        self.intrinsic_dim = Some(m);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn intrinsic_dim(&self) -> Option<usize> {
        self.intrinsic_dim
    }

    /// Intrinsic dimension when known, ambient otherwise.
    pub fn effective_dim(&self) -> usize {
        self.intrinsic_dim.unwrap_or(self.dim)
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Reorders the points: row `k` of the result is row `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let coords = perm
            .iter()
            .flat_map(|&i| self.point(i).iter().copied())
            .collect();
        Self {
            coords,
            dim: self.dim,
            intrinsic_dim: self.intrinsic_dim,
        }
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_input() {
        assert!(PointCloud::new(vec![0.0], 1).is_err());
        assert!(PointCloud::new(vec![0.0, 1.0, 2.0], 2).is_err());
        assert!(PointCloud::new(vec![0.0, f64::NAN], 1).is_err());
        assert!(PointCloud::new(vec![0.0, f64::INFINITY, 1.0, 1.0], 2).is_err());
        assert!(PointCloud::from_rows(&[vec![0.0, 1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn rows_and_intrinsic_dim() {
        let pc = PointCloud::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.point(1), &[2.0, 3.0]);
        assert_eq!(pc.effective_dim(), 2);
        let pc = pc.with_intrinsic_dim(1).unwrap();
        assert_eq!(pc.effective_dim(), 1);
        assert!(pc.clone().with_intrinsic_dim(3).is_err());
    }
}
