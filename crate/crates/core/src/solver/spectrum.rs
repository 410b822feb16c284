use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NeighborhoodGraph;

/// Largest `n` for which a dense eigendecomposition is attempted.
pub const DEFAULT_DENSE_CAP: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMode {
    FullDense,
    PartialIterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Smallest,
    Largest,
}

/// Laplacian eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub mode: SpectrumMode,
    /// Size of the graph the spectrum belongs to.
    pub n: usize,
    /// Column-major `n x n` eigenvectors; only from [`full_eigendecomposition`].
    #[serde(skip)]
    pub eigenvectors: Option<Vec<f64>>,
}

impl SpectrumResult {
    pub fn is_full(&self) -> bool {
        self.mode == SpectrumMode::FullDense && self.eigenvalues.len() == self.n
    }

    /// Fails unless this holds every eigenvalue of the graph.
    pub fn require_full(&self, what: &'static str) -> Result<&[f64]> {
        if self.is_full() {
            Ok(&self.eigenvalues)
        } else {
            Err(Error::PartialSpectrum {
                what,
                n: self.n,
                got: self.eigenvalues.len(),
            })
        }
    }

    /// `sum_k (rho lambda_k + 1)^{-power}` over the stored eigenvalues.
    pub fn shrinkage_power_sum(&self, rho: f64, power: i32) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&l| (rho * l + 1.0).powi(-power))
            .sum()
    }

    /// Writes `k,lambda` rows with 1-based `k`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,lambda")?;
        for (k, l) in self.eigenvalues.iter().enumerate() {
            // `+ 0.0` turns a computed `-0` into `0`
            writeln!(out, "{},{}", k + 1, l + 0.0)?;
        }
        Ok(())
    }
}

pub fn full_spectrum(g: &NeighborhoodGraph) -> Result<SpectrumResult> {
    full_spectrum_with_cap(g, DEFAULT_DENSE_CAP)
}

/// All eigenvalues of `L` from a dense symmetric eigensolver.
pub fn full_spectrum_with_cap(g: &NeighborhoodGraph, cap: usize) -> Result<SpectrumResult> {
    let m = dense_matrix(g, cap)?;
    let mut eigenvalues = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SpectrumResult {
        eigenvalues,
        mode: SpectrumMode::FullDense,
        n: g.len(),
        eigenvectors: None,
    })
}

/// Eigenvalues and eigenvectors of `L`.
pub fn full_eigendecomposition(g: &NeighborhoodGraph) -> Result<SpectrumResult> {
    let n = g.len();
    let m = dense_matrix(g, DEFAULT_DENSE_CAP)?;
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let eigenvalues = order.iter().map(|&k| s[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend((0..n).map(|i| u[(i, k)]));
    }
    Ok(SpectrumResult {
        eigenvalues,
        mode: SpectrumMode::FullDense,
        n,
        eigenvectors: Some(vectors),
    })
}

fn dense_matrix(g: &NeighborhoodGraph, cap: usize) -> Result<Mat<f64>> {
    let n = g.len();
    if n > cap {
        return Err(Error::Capacity { n, cap });
    }
    let l = g.dense_laplacian();
    Ok(Mat::from_fn(n, n, |i, j| l[i * n + j]))
}

/// Eigenvalues of a small dense symmetric matrix together with the last
/// component of each eigenvector, ascending. Used on Lanczos tridiagonals.
pub(crate) fn symmetric_eigen_with_last_row(a: &[f64], m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mat = Mat::from_fn(m, m, |i, j| a[i * m + j]);
    let evd = mat
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    Ok((
        order.iter().map(|&k| s[k]).collect(),
        order.iter().map(|&k| u[(m - 1, k)]).collect(),
    ))
}
