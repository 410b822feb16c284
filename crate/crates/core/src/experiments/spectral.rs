use serde::{Deserialize, Serialize};

use super::fit_loglog_slope;
use crate::error::{Error, Result};
use crate::estimator::connectivity_radius;
use crate::graph::build_graph;
use crate::kernel::{KernelFamily, KernelSpec};
use crate::rng::{replicate_index, stream, Purpose};
use crate::solver::full_spectrum;
use crate::synthetic::{sample_design_from, DesignSpec, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEnvelopeConfig {
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    pub c0: f64,
    pub kernel: KernelFamily,
    /// Fractions `(lo, hi)` of `n` bounding the `k` range of the slope fit.
    pub slope_range: (f64, f64),
    pub seed: u64,
}

impl Default for SpectralEnvelopeConfig {
    fn default() -> Self {
        Self {
            n_list: vec![500, 1000, 2000],
            d_list: vec![1, 2],
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            slope_range: (0.05, 0.5),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEnvelopeRow {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    pub lambda_1: f64,
    pub lambda_max: f64,
    pub max_degree: f64,
    /// Extremes of `lambda_k / A(k)` over `2 <= k <= n`, with
    /// `A(k) = min(n r^{d+2} k^{2/d}, n r^d)`.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub slope: f64,
    pub slope_std_err: f64,
    #[serde(skip)]
    pub eigenvalues: Vec<f64>,
}

impl SpectralEnvelopeRow {
    pub fn ratio_spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// `A(k) = min(n r^{d+2} k^{2/d}, n r^d)`.
pub fn spectral_envelope(n: usize, r: f64, d: usize, k: usize) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    (nf * r.powf(df + 2.0) * (k as f64).powf(2.0 / df)).min(nf * r.powf(df))
}

/// Full spectra on uniform `[0,1]^d` designs at the connectivity radius.
pub fn run_spectral_envelope(cfg: &SpectralEnvelopeConfig) -> Result<Vec<SpectralEnvelopeRow>> {
    let (lo, hi) = cfg.slope_range;
    if !(0.0 < lo && lo < hi && hi <= 1.0) {
        return Err(Error::Config(format!("bad slope range ({lo}, {hi})")));
    }
    let mut rows = Vec::new();
    for &d in &cfg.d_list {
        let kernel = KernelSpec::new(cfg.kernel.clone(), d)?;
        let design = DesignSpec::uniform(d, Domain::Unit);
        for &n in &cfg.n_list {
            let r = connectivity_radius(n, d, cfg.c0);
            let idx = replicate_index(n as u64, d as u64);
            let (points, _) =
                sample_design_from(&design, n, &mut stream(cfg.seed, Purpose::Design, idx))?;
            let g = build_graph(&points, r, &kernel)?;
            let spectrum = full_spectrum(&g)?;
            let lambda = spectrum.eigenvalues;
            let ratios = (2..=n).map(|k| lambda[k - 1] / spectral_envelope(n, r, d, k));
            let (min_ratio, max_ratio) = ratios
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                    (a.min(x), b.max(x))
                });
            let k_lo = ((lo * n as f64).ceil() as usize).max(2);
            let k_hi = (hi * n as f64).floor() as usize;
            let pts: Vec<(f64, f64)> = (k_lo..=k_hi).map(|k| (k as f64, lambda[k - 1])).collect();
            let (slope, slope_std_err) = fit_loglog_slope(&pts)?;
            log::info!(
                "d = {d}, n = {n}: slope {slope:.3}, ratio range [{min_ratio:.3}, {max_ratio:.3}]"
            );
            rows.push(SpectralEnvelopeRow {
                n,
                d,
                r,
                lambda_1: lambda[0],
                lambda_max: lambda[n - 1],
                max_degree: g.max_degree(),
                min_ratio,
                max_ratio,
                slope,
                slope_std_err,
                eigenvalues: lambda,
            });
        }
    }
    Ok(rows)
}
