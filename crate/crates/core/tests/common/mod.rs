//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's graph, solver or spectrum code.
#![allow(dead_code)]

use std::sync::Arc;

use lapsmooth::graph::NeighborhoodGraph;
use lapsmooth::kernel::KernelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random upper-triangle edge list with weights in (0, 1].
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, 1.0 - rng.random::<f64>()));
            }
        }
    }
    edges
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> NeighborhoodGraph {
    NeighborhoodGraph::from_upper_edges(n, 1.0, Arc::new(KernelSpec::uniform(1)), edges).unwrap()
}

/// Random graph that is connected: a random spanning path plus extra edges.
pub fn random_connected_edges(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
) -> Vec<(usize, usize, f64)> {
    let mut edges = random_edges(rng, n, density);
    let mut have = std::collections::HashSet::new();
    for &(i, j, _) in &edges {
        have.insert((i, j));
    }
    for i in 0..n - 1 {
        if !have.contains(&(i, i + 1)) {
            edges.push((i, i + 1, 0.5 + 0.5 * rng.random::<f64>()));
        }
    }
    edges
}

/// Dense row-major `D - W` assembled directly from an edge list.
pub fn dense_laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for &(i, j, w) in edges {
        l[i * n + j] -= w;
        l[j * n + i] -= w;
        l[i * n + i] += w;
        l[j * n + j] += w;
    }
    l
}

pub fn mat_vec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

pub fn quad_form(a: &[f64], x: &[f64]) -> f64 {
    mat_vec(a, x).iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p * n + col].abs().total_cmp(&m[q * n + col].abs()))
            .unwrap();
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row * n + k] * x[k]).sum();
        x[row] = (x[row] - s) / m[row * n + row];
    }
    x
}

/// `I + rho L` as a dense matrix.
pub fn shifted(l: &[f64], n: usize, rho: f64) -> Vec<f64> {
    let mut a: Vec<f64> = l.iter().map(|v| rho * v).collect();
    for i in 0..n {
        a[i * n + i] += 1.0;
    }
    a
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// All pairs within `r` by a double loop, weights from the kernel profile.
pub fn brute_force_edges(
    points: &[Vec<f64>],
    r: f64,
    kernel: &KernelSpec,
) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let w = kernel.weight_from_sq_dist(d2, r);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    edges
}

pub fn uniform_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Kolmogorov-Smirnov distance of a sample to the uniform CDF on `[lo, hi]`.
pub fn ks_uniform(sample: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
