//! Monte Carlo experiments: estimation-rate curves, manifold adaptivity,
//! spectral envelopes, seminorm concentration, variance sums, the
//! bias/variance certificate and testing power.
//!
//! Replicates run in parallel. Each draws from streams keyed by
//! `(seed, purpose, replicate_index(n, rep))` and results are collected by
//! index before any reduction, so outputs do not depend on thread count.

mod certificate;
mod output;
mod power;
mod rates;
mod seminorm;
mod spectral;
mod variance;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;
use crate::synthetic::{DesignSpec, Domain, SignalSpec};

pub use certificate::{
    run_certificate_check, CertificateConfig, CertificateReport, CertificateRow,
};
pub use output::{git_blob_sha256, Manifest, OutputDir, OutputFile};
pub use power::{
    run_testing_rate, run_type_one_error, TestingRateConfig, TestingRateReport, TypeOneConfig,
    TypeOneReport, TypeOneRow,
};
pub use rates::{run_manifold_rate_experiment, run_rate_experiment, RateCurve, RateRow};
pub use seminorm::{
    run_seminorm_check, SeminormConfig, SeminormReport, SeminormRow, SeminormSummary,
};
pub use spectral::{
    run_spectral_envelope, spectral_envelope, SpectralEnvelopeConfig, SpectralEnvelopeRow,
};
pub use variance::{default_t_grid, run_variance_sum_check, variance_sum_row, VarianceSumRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RateEstimation,
    SpectralEnvelope,
    Seminorm,
    Power,
    ManifoldRate,
    VarianceSums,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ExperimentTuning {
    /// Log grid of `points` penalties over `decades` decades centered at the
    /// theorem rule; the penalty with the smallest mean error is reported.
    Oracle {
        points: usize,
        decades: f64,
    },
    Theorem,
    Fixed {
        rho: f64,
    },
}

impl Default for ExperimentTuning {
    fn default() -> Self {
        ExperimentTuning::Oracle {
            points: 15,
            decades: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub design: DesignSpec,
    pub signal: SignalSpec,
    pub tuning: ExperimentTuning,
    /// `M` in the tuning rules.
    pub sobolev_radius: f64,
    /// Dimension used by the tuning rules; defaults to the design's
    /// intrinsic dimension.
    pub dim_used: Option<usize>,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub noise_sd: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Estimation rate on `[-1, 1]^d` with `prod_i cos(a pi x_i)`, `a = 2`
    /// for `d = 2` and 1 otherwise.
    pub fn rates(d: usize, n_grid: Vec<usize>, reps: usize, seed: u64) -> Self {
        Self {
            kind: ExperimentKind::RateEstimation,
            n_grid,
            reps,
            design: DesignSpec::uniform(d, Domain::Symmetric),
            signal: SignalSpec::sweep_cosine(d, 1.0),
            tuning: ExperimentTuning::default(),
            sobolev_radius: 1.0,
            dim_used: None,
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            noise_sd: 1.0,
            seed,
        }
    }

    /// Unit circle in `R^d` with the cosine-product signal evaluated at the
    /// embedded coordinates. The circle is `pi` times longer than `[-1, 1]`,
    /// so `c0 = 2 pi` keeps the expected neighbor count of [`Self::rates`]
    /// with `d = 1`.
    pub fn manifold_circle(d: usize, n_grid: Vec<usize>, reps: usize, seed: u64) -> Self {
        Self {
            kind: ExperimentKind::ManifoldRate,
            design: DesignSpec::circle(d),
            signal: SignalSpec::cosine(d, 1.0, 1.0),
            c0: 2.0 * std::f64::consts::PI,
            ..Self::rates(d, n_grid, reps, seed)
        }
    }

    pub fn with_tuning(mut self, tuning: ExperimentTuning) -> Self {
        self.tuning = tuning;
        self
    }

    pub fn dim_used(&self) -> usize {
        self.dim_used.unwrap_or(self.design.m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 3 {
            return Err(Error::Config(format!(
                "need at least 3 replicates, got {}",
                self.reps
            )));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "n grid must be nonempty and strictly ascending".into(),
            ));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("every n must be at least 2".into()));
        }
        let fits_slope = matches!(
            self.kind,
            ExperimentKind::RateEstimation | ExperimentKind::ManifoldRate
        );
        if fits_slope && self.n_grid.len() < 4 {
            return Err(Error::Config(format!(
                "a slope fit needs at least 4 sample sizes, got {}",
                self.n_grid.len()
            )));
        }
        if self.signal.d != self.design.d {
            return Err(Error::Config(format!(
                "signal dimension {} differs from design dimension {}",
                self.signal.d, self.design.d
            )));
        }
        if !(self.sobolev_radius > 0.0 && self.sobolev_radius.is_finite()) {
            return Err(Error::Config("Sobolev radius must be positive".into()));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::Config("c0 must be positive".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Config("noise sd must be nonnegative".into()));
        }
        if self.dim_used() == 0 {
            return Err(Error::Config("dim_used must be positive".into()));
        }
        match self.tuning {
            ExperimentTuning::Oracle { points, decades } if points == 0 || !(decades >= 0.0) => {
                return Err(Error::Config(
                    "oracle grid needs points >= 1 and decades >= 0".into(),
                ))
            }
            ExperimentTuning::Fixed { rho } if !(rho >= 0.0 && rho.is_finite()) => {
                return Err(Error::Config("fixed rho must be nonnegative".into()))
            }
            _ => {}
        }
        self.design.validate()
    }
}

/// Ordinary least squares of `log y` on `log x`; returns `(slope, std_err)`.
pub fn fit_loglog_slope(rows: &[(f64, f64)]) -> Result<(f64, f64)> {
    if rows.len() < 4 {
        return Err(Error::invalid(format!(
            "a slope fit needs at least 4 rows, got {}",
            rows.len()
        )));
    }
    if rows
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::invalid("log-log fit needs positive finite values"));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid(
            "log-log fit needs at least two distinct x values",
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let std_err = (sse / (k - 2.0) / sxx).sqrt();
    Ok((slope, std_err))
}

/// Parses `lo:hi:logK` (K log-spaced integers), `lo:hi:linK`, or a comma list.
pub fn parse_n_grid(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse n grid `{spec}`"));
    let grid: Vec<usize> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let (log, count) = if let Some(c) = parts[2].strip_prefix("log") {
            (true, c)
        } else if let Some(c) = parts[2].strip_prefix("lin") {
            (false, c)
        } else {
            return Err(bad());
        };
        let count: usize = count.parse().map_err(|_| bad())?;
        if count < 2 || !(lo >= 2.0 && hi > lo) {
            return Err(bad());
        }
        (0..count)
            .map(|i| {
                let u = i as f64 / (count - 1) as f64;
                let v = if log {
                    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + u * (hi - lo)
                };
                v.round() as usize
            })
            .collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "n grid `{spec}` is not strictly ascending"
        )));
    }
    Ok(grid)
}

pub(crate) fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
