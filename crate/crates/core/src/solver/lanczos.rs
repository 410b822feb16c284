//! Lanczos with full reorthogonalization for extremal Laplacian eigenvalues.
//!
//! Every Krylov vector is kept and reorthogonalized twice against the whole
//! basis, so there are no ghost eigenvalues and the tridiagonal `T_m` stays
//! faithful. A Ritz value `theta_i` is accepted once its residual bound
//! `|beta_m s_{m,i}|` drops below `tol * ||L||`, with `||L||` estimated by
//! the largest Ritz value. A single start vector finds one copy of each
//! distinct eigenvalue; repeated eigenvalues (e.g. several components)
//! show up once.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::spectrum::{symmetric_eigen_with_last_row, SpectrumMode, SpectrumResult, Which};
use super::{dot, norm};
use crate::error::{Error, Result};
use crate::graph::NeighborhoodGraph;

/// Largest `k` served without restarting.
pub const MAX_PARTIAL_K: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Krylov dimension cap; `None` means `min(n, 20 k + 200)`.
    pub max_steps: Option<usize>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_steps: None,
            tol: 1e-10,
            seed: 0x5eed_1a2c,
        }
    }
}

pub fn partial_spectrum(g: &NeighborhoodGraph, k: usize, which: Which) -> Result<SpectrumResult> {
    partial_spectrum_with(g, k, which, &LanczosOptions::default())
}

pub fn partial_spectrum_with(
    g: &NeighborhoodGraph,
    k: usize,
    which: Which,
    opts: &LanczosOptions,
) -> Result<SpectrumResult> {
    let n = g.len();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "need 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    if k > MAX_PARTIAL_K {
        return Err(Error::invalid(format!(
            "k = {k} exceeds {MAX_PARTIAL_K}; use the full spectrum instead"
        )));
    }
    let max_steps = opts.max_steps.unwrap_or(20 * k + 200).min(n).max(k);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);

    let mut q = random_unit(n, &mut rng, &basis);
    let mut w = vec![0.0; n];

    loop {
        let j = basis.len();
        g.laplacian_into(&q, &mut w);
        let a = dot(&q, &w);
        basis.push(q);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm(&w);
        let steps = j + 1;
        let scale = alpha
            .iter()
            .map(|a| a.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let breakdown = b <= 1e-12 * scale;

        if steps.is_multiple_of(10) || steps == max_steps || breakdown || steps == n {
            let (theta, last_row) = tridiagonal_eigen(&alpha, &beta)?;
            let norm_est = theta.iter().map(|t| t.abs()).fold(scale, f64::max);
            let resid_beta = if breakdown { 0.0 } else { b };
            let converged: Vec<bool> = last_row
                .iter()
                .map(|s| (resid_beta * s).abs() <= opts.tol * norm_est)
                .collect();
            let idx: Vec<usize> = match which {
                Which::Smallest => (0..theta.len().min(k)).collect(),
                Which::Largest => (theta.len().saturating_sub(k)..theta.len()).collect(),
            };
            let n_ok = idx.iter().filter(|&&i| converged[i]).count();
            if theta.len() >= k && n_ok == k {
                return Ok(SpectrumResult {
                    eigenvalues: idx.iter().map(|&i| theta[i]).collect(),
                    mode: SpectrumMode::PartialIterative,
                    n,
                    eigenvectors: None,
                });
            }
            if steps >= max_steps || steps == n {
                return Err(Error::LanczosNotConverged {
                    wanted: k,
                    converged: n_ok,
                    steps,
                    partial: idx
                        .iter()
                        .filter(|&&i| converged[i])
                        .map(|&i| theta[i])
                        .collect(),
                });
            }
        }

        if breakdown {
            // invariant subspace: continue from a fresh orthogonal direction
            beta.push(0.0);
            q = random_unit(n, &mut rng, &basis);
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = alpha.len();
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        t[i * m + i] = alpha[i];
        if i + 1 < m {
            t[i * m + i + 1] = beta[i];
            t[(i + 1) * m + i] = beta[i];
        }
    }
    symmetric_eigen_with_last_row(&t, m)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use std::sync::Arc;

    fn path(n: usize) -> NeighborhoodGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        NeighborhoodGraph::from_upper_edges(n, 1.0, Arc::new(KernelSpec::uniform(1)), &edges)
            .unwrap()
    }

    #[test]
    fn path_graph_extremes() {
        // path Laplacian eigenvalues: 2 - 2 cos(pi k / n)
        let n = 60;
        let g = path(n);
        let exact = |k: usize| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
        let s = partial_spectrum(&g, 3, Which::Smallest).unwrap();
        for k in 0..3 {
            assert!((s.eigenvalues[k] - exact(k)).abs() < 1e-8, "{k}");
        }
        let s = partial_spectrum(&g, 2, Which::Largest).unwrap();
        assert!((s.eigenvalues[1] - exact(n - 1)).abs() < 1e-8);
        assert!((s.eigenvalues[0] - exact(n - 2)).abs() < 1e-8);
        assert_eq!(s.mode, SpectrumMode::PartialIterative);
    }

    #[test]
    fn bad_k() {
        let g = path(10);
        assert!(partial_spectrum(&g, 0, Which::Smallest).is_err());
        assert!(partial_spectrum(&g, 10, Which::Smallest).is_err());
    }

    #[test]
    fn step_budget_exhaustion_carries_partial_results() {
        let g = path(400);
        let opts = LanczosOptions {
            max_steps: Some(12),
            ..Default::default()
        };
        match partial_spectrum_with(&g, 4, Which::Smallest, &opts) {
            Err(Error::LanczosNotConverged {
                wanted: 4,
                steps: 12,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
