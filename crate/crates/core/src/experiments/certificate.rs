use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimator::{
    bias_variance_certificate, resolve_tuning, SmoothingProblem, Task, TuningOverrides,
};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::rng::replicate_index;
use crate::solver::full_spectrum;
use crate::synthetic::{make_replicate, DesignSpec, Domain, SignalSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    pub n: usize,
    pub reps: usize,
    pub design: DesignSpec,
    pub signal: SignalSpec,
    pub sobolev_radius: f64,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub seed: u64,
}

impl CertificateConfig {
    /// Uniform `[0,1]` design with `cos(pi x)`.
    pub fn one_dimensional(n: usize, reps: usize, seed: u64) -> Self {
        Self {
            n,
            reps,
            design: DesignSpec::uniform(1, Domain::Unit),
            signal: SignalSpec::cosine(1, 1.0, 1.0),
            sobolev_radius: 1.0,
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub replicate: usize,
    pub mse: f64,
    pub bias_bound: f64,
    pub variance_bound: f64,
    pub probability: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub rho: f64,
    pub r: f64,
    pub rows: Vec<CertificateRow>,
    pub holds_fraction: f64,
}

/// Compares the in-sample error against `bias_bound + variance_bound` on
/// independent replicates under theorem tuning.
pub fn run_certificate_check(cfg: &CertificateConfig) -> Result<CertificateReport> {
    let kernel = KernelSpec::new(cfg.kernel.clone(), cfg.design.d)?;
    let tuning = resolve_tuning(
        cfg.n,
        cfg.design.m,
        cfg.sobolev_radius,
        Task::Estimation,
        &TuningOverrides {
            c0: cfg.c0,
            ..Default::default()
        },
    )?;
    let rows: Vec<CertificateRow> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let idx = replicate_index(cfg.n as u64, rep as u64);
            let ds = make_replicate(&cfg.design, &cfg.signal, cfg.n, cfg.seed, idx, 1.0)?;
            let problem = SmoothingProblem::new(ds.points, tuning.r, &kernel)?;
            let fit = problem.fit(&ds.y, &tuning)?.with_truth(&ds.f0_at_points)?;
            let spectrum = full_spectrum(problem.graph())?;
            let bound = bias_variance_certificate(&fit, &ds.f0_at_points, &spectrum)?;
            let mse = fit.in_sample_mse.expect("truth supplied");
            Ok(CertificateRow {
                replicate: rep,
                mse,
                bias_bound: bound.bias_bound,
                variance_bound: bound.variance_bound,
                probability: bound.probability,
                holds: bound.holds_for(mse),
            })
        })
        .collect::<Result<_>>()?;
    let holds_fraction = rows.iter().filter(|r| r.holds).count() as f64 / rows.len().max(1) as f64;
    Ok(CertificateReport {
        rho: tuning.rho,
        r: tuning.r,
        rows,
        holds_fraction,
    })
}
