use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_loglog_slope, ExperimentConfig};
use crate::error::{Error, Result};
use crate::estimator::{resolve_tuning, SmoothingProblem, Task, TuningOverrides};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::rng::replicate_index;
use crate::solver::full_spectrum;
use crate::synthetic::{make_replicate, DesignSpec, Domain, SignalSpec};
use crate::testing::{
    gof_test_permutation_on, mean_square, power_curve, spectral_threshold, Calibration,
    PowerConfig, PowerCurve,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestingRateConfig {
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub epsilons: Vec<f64>,
    pub alpha: f64,
    pub target_power: f64,
    pub design: DesignSpec,
    pub shape: SignalSpec,
    pub sobolev_radius: f64,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub seed: u64,
}

impl TestingRateConfig {
    /// Uniform `[0,1]` design, alternative `eps * sqrt(2) cos(pi x)`, 60
    /// log-spaced separations in `[0.02, 2]`.
    pub fn one_dimensional(n_grid: Vec<usize>, reps: usize, seed: u64) -> Self {
        Self {
            n_grid,
            reps,
            epsilons: (0..60)
                .map(|i| 0.02 * 100f64.powf(i as f64 / 59.0))
                .collect(),
            alpha: 0.05,
            target_power: 0.8,
            design: DesignSpec::uniform(1, Domain::Unit),
            shape: SignalSpec::cosine(1, 1.0, 1.0),
            sobolev_radius: 1.0,
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            seed,
        }
    }

    /// Borrows the design, shape and seed of a generic experiment config.
    pub fn from_experiment(cfg: &ExperimentConfig) -> Self {
        Self {
            n_grid: cfg.n_grid.clone(),
            reps: cfg.reps,
            design: cfg.design.clone(),
            shape: cfg.signal.clone(),
            sobolev_radius: cfg.sobolev_radius,
            c0: cfg.c0,
            kernel: cfg.kernel.clone(),
            ..Self::one_dimensional(cfg.n_grid.clone(), cfg.reps, cfg.seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestingRateReport {
    pub curves: Vec<PowerCurve>,
    /// `(n, eps)` at the target power; `None` when the grid never reaches it.
    pub critical: Vec<(usize, Option<f64>)>,
    pub fitted_slope: Option<f64>,
    pub slope_std_err: Option<f64>,
    /// `-2 / (4 + d)`: the separation exponent at fixed power.
    pub reference_slope: f64,
}

/// Spectral-calibrated power curves over `n` and the log-log slope of the
/// separation needed for the target power.
pub fn run_testing_rate(cfg: &TestingRateConfig) -> Result<TestingRateReport> {
    if !(cfg.target_power > 0.0 && cfg.target_power < 1.0) {
        return Err(Error::Config("target power must lie in (0, 1)".into()));
    }
    if cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("n grid must be strictly ascending".into()));
    }
    let mut curves = Vec::new();
    let mut critical = Vec::new();
    for &n in &cfg.n_grid {
        let curve = power_curve(&PowerConfig {
            design: cfg.design.clone(),
            shape: cfg.shape.clone(),
            n,
            epsilons: cfg.epsilons.clone(),
            reps: cfg.reps,
            alpha: cfg.alpha,
            calibration: Calibration::Spectral,
            n_perm: 0,
            sobolev_radius: cfg.sobolev_radius,
            c0: cfg.c0,
            kernel: cfg.kernel.clone(),
            seed: cfg.seed,
        })?;
        let eps = curve.critical_epsilon(cfg.target_power);
        log::info!(
            "n = {n}: null rejection {:.3}, critical separation {eps:?}",
            curve.null_rejection_rate
        );
        critical.push((n, eps));
        curves.push(curve);
    }
    let pts: Option<Vec<(f64, f64)>> = critical
        .iter()
        .map(|&(n, e)| e.map(|e| (n as f64, e)))
        .collect();
    let fit = pts.and_then(|p| fit_loglog_slope(&p).ok());
    Ok(TestingRateReport {
        curves,
        critical,
        fitted_slope: fit.map(|f| f.0),
        slope_std_err: fit.map(|f| f.1),
        reference_slope: -2.0 / (4.0 + cfg.design.m as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeOneConfig {
    pub n: usize,
    pub reps: usize,
    pub alphas: Vec<f64>,
    pub calibration: Calibration,
    pub n_perm: usize,
    pub design: DesignSpec,
    pub sobolev_radius: f64,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub seed: u64,
}

impl TypeOneConfig {
    pub fn one_dimensional(n: usize, reps: usize, calibration: Calibration, seed: u64) -> Self {
        Self {
            n,
            reps,
            alphas: vec![0.05],
            calibration,
            n_perm: 199,
            design: DesignSpec::uniform(1, Domain::Unit),
            sobolev_radius: 1.0,
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeOneRow {
    pub alpha: f64,
    pub rejection_rate: f64,
    pub mc_std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeOneReport {
    pub rows: Vec<TypeOneRow>,
    pub rho: f64,
    pub r: f64,
}

/// Rejection rates under pure noise; a fresh design per replicate. All
/// levels are decided from the same statistic (or p-value) per replicate.
pub fn run_type_one_error(cfg: &TypeOneConfig) -> Result<TypeOneReport> {
    if cfg.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::Config("levels must lie in (0, 1)".into()));
    }
    let kernel = KernelSpec::new(cfg.kernel.clone(), cfg.design.d)?;
    let tuning = resolve_tuning(
        cfg.n,
        cfg.design.m,
        cfg.sobolev_radius,
        Task::Testing,
        &TuningOverrides {
            c0: cfg.c0,
            ..Default::default()
        },
    )?;
    let zero = SignalSpec::zero(cfg.design.d);
    let decisions: Vec<Vec<bool>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let idx = replicate_index(cfg.n as u64, rep);
            let ds = make_replicate(&cfg.design, &zero, cfg.n, cfg.seed, idx, 1.0)?;
            let problem = SmoothingProblem::new(ds.points, tuning.r, &kernel)?;
            match cfg.calibration {
                Calibration::Spectral => {
                    let spectrum = full_spectrum(problem.graph())?;
                    let (f, _) = problem.smooth(&ds.y, tuning.rho)?;
                    let stat = mean_square(&f);
                    cfg.alphas
                        .iter()
                        .map(|&a| Ok(stat > spectral_threshold(&spectrum, tuning.rho, a, cfg.n)?))
                        .collect()
                }
                Calibration::Permutation => {
                    let res = gof_test_permutation_on(
                        &problem,
                        &ds.y,
                        tuning.rho,
                        0.5,
                        cfg.n_perm,
                        cfg.seed ^ idx,
                    )?;
                    let p = res.p_value.expect("permutation test reports a p-value");
                    Ok(cfg.alphas.iter().map(|&a| p <= a).collect())
                }
            }
        })
        .collect::<Result<_>>()?;
    let k = cfg.reps as f64;
    let rows = cfg
        .alphas
        .iter()
        .enumerate()
        .map(|(j, &alpha)| {
            let rate = decisions.iter().filter(|d| d[j]).count() as f64 / k;
            TypeOneRow {
                alpha,
                rejection_rate: rate,
                mc_std_err: (alpha * (1.0 - alpha) / k).sqrt(),
            }
        })
        .collect();
    Ok(TypeOneReport {
        rows,
        rho: tuning.rho,
        r: tuning.r,
    })
}
