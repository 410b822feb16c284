use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mean_and_std_err;
use crate::error::{Error, Result};
use crate::estimator::connectivity_radius;
use crate::graph::build_graph;
use crate::kernel::{KernelFamily, KernelSpec};
use crate::rng::replicate_index;
use crate::synthetic::{make_replicate, sobolev_seminorm_oracle, DesignSpec, Domain, SignalSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormConfig {
    pub n_list: Vec<usize>,
    /// Uniform design on `[0,1]^d`.
    pub d: usize,
    pub signal: SignalSpec,
    pub seeds: usize,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub seed: u64,
}

impl SeminormConfig {
    /// `f(x) = x_1` on `[0,1]^d`.
    pub fn linear(d: usize, n_list: Vec<usize>, seeds: usize, seed: u64) -> Self {
        Self {
            n_list,
            d,
            signal: SignalSpec::linear(d, 0, 1.0),
            seeds,
            c0: 2.0,
            kernel: KernelFamily::Uniform,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormRow {
    pub n: usize,
    pub replicate: usize,
    pub r: f64,
    /// `f^T L f / (n^2 r^{d+2} |f|^2_{H^1})`, or the unnormalized
    /// `f^T L f / (n^2 r^{d+2})` when the seminorm is zero.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub seminorm: f64,
    pub rows: Vec<SeminormRow>,
    pub summary: Vec<SeminormSummary>,
}

pub fn run_seminorm_check(cfg: &SeminormConfig) -> Result<SeminormReport> {
    if cfg.seeds < 2 {
        return Err(Error::Config(
            "seminorm check needs at least 2 replicates".into(),
        ));
    }
    if cfg.signal.d != cfg.d {
        return Err(Error::Config(
            "signal dimension differs from design dimension".into(),
        ));
    }
    let design = DesignSpec::uniform(cfg.d, Domain::Unit);
    let seminorm = sobolev_seminorm_oracle(&cfg.signal, Domain::Unit)?;
    let kernel = KernelSpec::new(cfg.kernel.clone(), cfg.d)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &n in &cfg.n_list {
        let r = connectivity_radius(n, cfg.d, cfg.c0);
        let scale = (n as f64).powi(2)
            * r.powi(cfg.d as i32 + 2)
            * if seminorm > 0.0 { seminorm } else { 1.0 };
        let ratios: Vec<f64> = (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|rep| {
                let ds = make_replicate(
                    &design,
                    &cfg.signal,
                    n,
                    cfg.seed,
                    replicate_index(n as u64, rep),
                    0.0,
                )?;
                let g = build_graph(&ds.points, r, &kernel)?;
                Ok(g.quadratic_form(&ds.f0_at_points)? / scale)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_and_std_err(&ratios);
        summary.push(SeminormSummary {
            n,
            mean,
            variance: se * se * ratios.len() as f64,
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
        rows.extend(
            ratios
                .iter()
                .enumerate()
                .map(|(replicate, &ratio)| SeminormRow {
                    n,
                    replicate,
                    r,
                    ratio,
                }),
        );
    }
    Ok(SeminormReport {
        seminorm,
        rows,
        summary,
    })
}
