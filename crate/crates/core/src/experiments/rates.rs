use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    fit_loglog_slope, mean_and_std_err, ExperimentConfig, ExperimentKind, ExperimentTuning,
};
use crate::error::{Error, Result};
use crate::estimator::{
    mean_squared_difference, resolve_tuning, rho_grid, SmoothingProblem, Task, TuningOverrides,
};
use crate::kernel::KernelSpec;
use crate::rng::replicate_index;
use crate::synthetic::make_replicate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub mean_error: f64,
    pub std_error: f64,
    /// Penalty behind `mean_error` (the oracle choice in grid mode).
    pub rho: f64,
    pub r: f64,
    /// The oracle choice sits at an end of its grid.
    #[serde(default)]
    pub at_grid_edge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub rows: Vec<RateRow>,
    /// `None` when the errors cannot be log-transformed (e.g. all zero).
    pub fitted_slope: Option<f64>,
    pub slope_std_err: Option<f64>,
    pub reference_slope: f64,
    pub dim_used: usize,
}

impl RateCurve {
    /// Pairs `(n_i, n_{i+1})` whose mean error rises by at least `tol_se`
    /// combined standard errors.
    pub fn non_decreasing_pairs(&self, tol_se: f64) -> Vec<(usize, usize)> {
        self.rows
            .windows(2)
            .filter(|w| {
                let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
                w[1].mean_error >= w[0].mean_error + tol_se * se
            })
            .map(|w| (w[0].n, w[1].n))
            .collect()
    }
}

/// In-sample MSE versus `n` on a full-dimensional design.
pub fn run_rate_experiment(cfg: &ExperimentConfig) -> Result<RateCurve> {
    cfg.validate()?;
    rate_curve(cfg)
}

/// As [`run_rate_experiment`] on a manifold design; tuning uses the
/// intrinsic dimension unless `dim_used` overrides it.
pub fn run_manifold_rate_experiment(cfg: &ExperimentConfig) -> Result<RateCurve> {
    cfg.validate()?;
    if !cfg.design.is_manifold() {
        return Err(Error::Config(
            "manifold rate experiment needs a manifold design".into(),
        ));
    }
    if cfg.kind != ExperimentKind::ManifoldRate {
        log::warn!(
            "running a manifold rate experiment with kind {:?}",
            cfg.kind
        );
    }
    rate_curve(cfg)
}

fn rate_curve(cfg: &ExperimentConfig) -> Result<RateCurve> {
    let dim = cfg.dim_used();
    let kernel = KernelSpec::new(cfg.kernel.clone(), cfg.design.d)?;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let overrides = TuningOverrides {
            c0: cfg.c0,
            ..Default::default()
        };
        let tuning = resolve_tuning(n, dim, cfg.sobolev_radius, Task::Estimation, &overrides)?;
        let rhos = match cfg.tuning {
            ExperimentTuning::Oracle { points, decades } => rho_grid(tuning.rho, points, decades),
            ExperimentTuning::Theorem => vec![tuning.rho],
            ExperimentTuning::Fixed { rho } => vec![rho],
        };
        let errors: Vec<Vec<f64>> = (0..cfg.reps as u64)
            .into_par_iter()
            .map(|rep| {
                let idx = replicate_index(n as u64, rep);
                let ds = make_replicate(&cfg.design, &cfg.signal, n, cfg.seed, idx, cfg.noise_sd)?;
                let problem = SmoothingProblem::new(ds.points, tuning.r, &kernel)?;
                rhos.iter()
                    .map(|&rho| {
                        let (f, _) = problem.smooth(&ds.y, rho).inspect_err(|e| {
                            log::error!("n = {n}, replicate {rep}, rho = {rho:.4e}: {e}")
                        })?;
                        mean_squared_difference(&f, &ds.f0_at_points)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let stats: Vec<(f64, f64)> = (0..rhos.len())
            .map(|j| mean_and_std_err(&errors.iter().map(|e| e[j]).collect::<Vec<_>>()))
            .collect();
        let best = (0..rhos.len())
            .min_by(|&a, &b| stats[a].0.total_cmp(&stats[b].0))
            .expect("grid is nonempty");
        let at_grid_edge = rhos.len() > 1 && (best == 0 || best == rhos.len() - 1);
        if at_grid_edge {
            log::warn!(
                "n = {n}: oracle penalty {:.4e} is at the edge of its grid",
                rhos[best]
            );
        }
        log::info!(
            "n = {n}: mean error {:.4e} at rho {:.4e}",
            stats[best].0,
            rhos[best]
        );
        rows.push(RateRow {
            n,
            mean_error: stats[best].0,
            std_error: stats[best].1,
            rho: rhos[best],
            r: tuning.r,
            at_grid_edge,
        });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_error)).collect();
    let fit = fit_loglog_slope(&pairs).ok();
    Ok(RateCurve {
        rows,
        fitted_slope: fit.map(|f| f.0),
        slope_std_err: fit.map(|f| f.1),
        reference_slope: -2.0 / (2.0 + dim as f64),
        dim_used: dim,
    })
}
