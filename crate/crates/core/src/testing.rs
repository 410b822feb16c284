//! Goodness-of-fit testing of `H0: f_0 = 0` with `T_hat = ||f_hat||^2 / n`.
//!
//! Two calibrations: the spectral threshold
//! `t_alpha = (1/n) sum_k s_k^2 + (1/n) sqrt((2/alpha) sum_k s_k^4)`,
//! `s_k = 1 / (rho lambda_k + 1)`, which needs every eigenvalue of `L`; and a
//! permutation test that reshuffles `Y` over the fixed design. A nonzero null
//! `f_0*` is handled by testing `Y - f_0*(X)` (see [`center_by_null`]).

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    resolve_tuning, SmoothingFit, SmoothingProblem, Task, TuningOverrides, TuningSpec,
};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::points::PointCloud;
use crate::rng::{replicate_index, stream, Purpose};
use crate::solver::{full_spectrum, SpectrumResult};
use crate::synthetic::{sample_design_from, DesignSpec, SignalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Calibration {
    Spectral,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofTestResult {
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub reject: bool,
    pub calibration: Calibration,
    pub rho: f64,
    pub r: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_perm: Option<usize>,
}

/// `T_hat = ||f_hat||^2 / n`.
pub fn test_statistic(fit: &SmoothingFit) -> f64 {
    mean_square(&fit.f_hat)
}

pub fn mean_square(f: &[f64]) -> f64 {
    f.iter().map(|v| v * v).sum::<f64>() / f.len() as f64
}

/// Subtracts a nonzero null `f_0*(X_i)` from the responses.
pub fn center_by_null(y: &[f64], null_at_points: &[f64]) -> Result<Vec<f64>> {
    Error::check_len(y.len(), null_at_points.len())?;
    Ok(y.iter().zip(null_at_points).map(|(a, b)| a - b).collect())
}

pub fn spectral_threshold(
    spectrum: &SpectrumResult,
    rho: f64,
    alpha: f64,
    n: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    Error::check_len(n, spectrum.n)?;
    spectrum.require_full("the spectral threshold")?;
    let nf = n as f64;
    let s2 = spectrum.shrinkage_power_sum(rho, 2);
    let s4 = spectrum.shrinkage_power_sum(rho, 4);
    Ok(s2 / nf + (2.0 / alpha * s4).sqrt() / nf)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// `(1 + #{T_b >= T_obs}) / (B + 1)`.
pub fn permutation_p_value(observed: f64, permuted: &[f64]) -> f64 {
    let exceed = permuted.iter().filter(|&&t| t >= observed).count();
    (1 + exceed) as f64 / (permuted.len() + 1) as f64
}

pub fn gof_test_spectral(
    points: &PointCloud,
    y: &[f64],
    tuning: &TuningSpec,
    kernel: &KernelSpec,
    alpha: f64,
) -> Result<GofTestResult> {
    Error::check_len(points.len(), y.len())?;
    let problem = SmoothingProblem::new(points.clone(), tuning.r, kernel)?;
    let spectrum = full_spectrum(problem.graph())?;
    gof_test_spectral_on(&problem, y, tuning.rho, alpha, &spectrum)
}

/// Spectral test on a prepared design, reusing its spectrum.
pub fn gof_test_spectral_on(
    problem: &SmoothingProblem,
    y: &[f64],
    rho: f64,
    alpha: f64,
    spectrum: &SpectrumResult,
) -> Result<GofTestResult> {
    let n = problem.graph().len();
    Error::check_len(n, y.len())?;
    let threshold = spectral_threshold(spectrum, rho, alpha, n)?;
    let (f, _) = problem.smooth(y, rho)?;
    let statistic = mean_square(&f);
    Ok(GofTestResult {
        statistic,
        threshold: Some(threshold),
        p_value: None,
        alpha,
        reject: statistic > threshold,
        calibration: Calibration::Spectral,
        rho,
        r: problem.graph().radius(),
        n,
        n_perm: None,
    })
}

pub fn gof_test_permutation(
    points: &PointCloud,
    y: &[f64],
    tuning: &TuningSpec,
    kernel: &KernelSpec,
    alpha: f64,
    n_perm: usize,
    seed: u64,
) -> Result<GofTestResult> {
    Error::check_len(points.len(), y.len())?;
    let problem = SmoothingProblem::new(points.clone(), tuning.r, kernel)?;
    gof_test_permutation_on(&problem, y, tuning.rho, alpha, n_perm, seed)
}

/// Permutation test on a prepared design. Replicate `b` shuffles `y` with
/// its own stream keyed by `(seed, b)`.
pub fn gof_test_permutation_on(
    problem: &SmoothingProblem,
    y: &[f64],
    rho: f64,
    alpha: f64,
    n_perm: usize,
    seed: u64,
) -> Result<GofTestResult> {
    check_alpha(alpha)?;
    if n_perm < 99 {
        return Err(Error::invalid(format!(
            "need at least 99 permutations, got {n_perm}"
        )));
    }
    let n = problem.graph().len();
    Error::check_len(n, y.len())?;
    let (f, _) = problem.smooth(y, rho)?;
    let statistic = mean_square(&f);
    let permuted: Vec<f64> = (0..n_perm as u64)
        .into_par_iter()
        .map(|b| {
            let mut shuffled = y.to_vec();
            shuffled.shuffle(&mut stream(seed, Purpose::Permutation, b));
            problem.smooth(&shuffled, rho).map(|(f, _)| mean_square(&f))
        })
        .collect::<Result<_>>()?;
    let p_value = permutation_p_value(statistic, &permuted);
    Ok(GofTestResult {
        statistic,
        threshold: None,
        p_value: Some(p_value),
        alpha,
        reject: p_value <= alpha,
        calibration: Calibration::Permutation,
        rho,
        r: problem.graph().radius(),
        n,
        n_perm: Some(n_perm),
    })
}

/// Monte Carlo power study at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub design: DesignSpec,
    /// Alternative shape; rescaled internally to unit `L^2(P)` norm so that
    /// `f_0 = eps * shape` sits at `L^2` distance `eps` from the null.
    pub shape: SignalSpec,
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub reps: usize,
    pub alpha: f64,
    pub calibration: Calibration,
    pub n_perm: usize,
    pub sobolev_radius: f64,
    pub c0: f64,
    pub kernel: KernelFamily,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub epsilon: f64,
    pub rejection_rate: f64,
    pub mc_std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub n: usize,
    pub rows: Vec<PowerRow>,
    pub null_rejection_rate: f64,
    pub null_std_err: f64,
    pub rho: f64,
    pub r: f64,
}

impl PowerCurve {
    /// Smallest separation reaching `target` power, interpolated linearly in
    /// `log eps` between grid points.
    pub fn critical_epsilon(&self, target: f64) -> Option<f64> {
        let hit = self
            .rows
            .iter()
            .position(|row| row.rejection_rate >= target)?;
        if hit == 0 {
            return Some(self.rows[0].epsilon);
        }
        let (lo, hi) = (self.rows[hit - 1], self.rows[hit]);
        if lo.epsilon <= 0.0 {
            return Some(hi.epsilon);
        }
        let frac = (target - lo.rejection_rate) / (hi.rejection_rate - lo.rejection_rate);
        Some((lo.epsilon.ln() + frac * (hi.epsilon.ln() - lo.epsilon.ln())).exp())
    }
}

fn rate_row(epsilon: f64, rejections: usize, reps: usize) -> PowerRow {
    let rate = rejections as f64 / reps as f64;
    PowerRow {
        epsilon,
        rejection_rate: rate,
        mc_std_err: (rate * (1.0 - rate) / reps as f64).sqrt(),
    }
}

/// Empirical rejection rates over `cfg.epsilons`.
///
/// Each replicate draws a fresh design and noise vector and reuses them for
/// every `eps` (common random numbers). With spectral calibration the fit is
/// linear in `Y`, so `f_hat(eps) = eps S g + S xi` comes from two solves per
/// replicate.
pub fn power_curve(cfg: &PowerConfig) -> Result<PowerCurve> {
    check_alpha(cfg.alpha)?;
    if cfg.reps == 0 {
        return Err(Error::invalid("need at least one replicate"));
    }
    if cfg.epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::invalid("separations must be finite and nonnegative"));
    }
    let domain = cfg.design.domain().ok_or_else(|| {
        Error::Unsupported("power curves need a cube design for the L2 normalization".into())
    })?;
    let norm2 = cfg.shape.mean_square_uniform(domain)?;
    if norm2 <= 0.0 {
        return Err(Error::invalid("alternative shape has zero norm"));
    }
    let shape = cfg
        .shape
        .clone()
        .with_amplitude(cfg.shape.amplitude / norm2.sqrt());
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

    let per_rep: Vec<(bool, Vec<bool>)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let idx = replicate_index(cfg.n as u64, rep);
            let (points, _) = sample_design_from(
                &cfg.design,
                cfg.n,
                &mut stream(cfg.seed, Purpose::Design, idx),
            )?;
            let g: Vec<f64> = points.iter().map(|x| shape.eval(x)).collect();
            let xi = standard_normal_vec(cfg.n, cfg.seed, idx);
            let problem = SmoothingProblem::new(points, tuning.r, &kernel)?;
            match cfg.calibration {
                Calibration::Spectral => {
                    let spectrum = full_spectrum(problem.graph())?;
                    let t = spectral_threshold(&spectrum, tuning.rho, cfg.alpha, cfg.n)?;
                    let (sg, _) = problem.smooth(&g, tuning.rho)?;
                    let (sxi, _) = problem.smooth(&xi, tuning.rho)?;
                    let stat = |eps: f64| {
                        sg.iter()
                            .zip(&sxi)
                            .map(|(a, b)| (eps * a + b).powi(2))
                            .sum::<f64>()
                            / cfg.n as f64
                    };
                    Ok((
                        stat(0.0) > t,
                        cfg.epsilons.iter().map(|&e| stat(e) > t).collect(),
                    ))
                }
                Calibration::Permutation => {
                    let decide = |eps: f64| -> Result<bool> {
                        let y: Vec<f64> = g.iter().zip(&xi).map(|(a, b)| eps * a + b).collect();
                        let res = gof_test_permutation_on(
                            &problem,
                            &y,
                            tuning.rho,
                            cfg.alpha,
                            cfg.n_perm,
                            cfg.seed ^ idx,
                        )?;
                        Ok(res.reject)
                    };
                    let null = decide(0.0)?;
                    let alt = cfg
                        .epsilons
                        .iter()
                        .map(|&e| decide(e))
                        .collect::<Result<_>>()?;
                    Ok((null, alt))
                }
            }
        })
        .collect::<Result<_>>()?;

    let null_hits = per_rep.iter().filter(|(null, _)| *null).count();
    let null_row = rate_row(0.0, null_hits, cfg.reps);
    let rows = cfg
        .epsilons
        .iter()
        .enumerate()
        .map(|(j, &eps)| {
            rate_row(
                eps,
                per_rep.iter().filter(|(_, alt)| alt[j]).count(),
                cfg.reps,
            )
        })
        .collect();
    Ok(PowerCurve {
        n: cfg.n,
        rows,
        null_rejection_rate: null_row.rejection_rate,
        null_std_err: null_row.mc_std_err,
        rho: tuning.rho,
        r: tuning.r,
    })
}

pub(crate) fn standard_normal_vec(n: usize, seed: u64, index: u64) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = stream(seed, Purpose::Noise, index);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NeighborhoodGraph;
    use crate::solver::SpectrumMode;
    use std::sync::Arc;

    fn spectrum(eigs: Vec<f64>) -> SpectrumResult {
        SpectrumResult {
            n: eigs.len(),
            eigenvalues: eigs,
            mode: SpectrumMode::FullDense,
            eigenvectors: None,
        }
    }

    #[test]
    fn threshold_at_rho_zero() {
        let n = 400;
        let s = spectrum((0..n).map(|k| k as f64 * 0.3).collect());
        let t = spectral_threshold(&s, 0.0, 0.05, n).unwrap();
        let want = 1.0 + (n as f64).powf(-0.5) * (2.0f64 / 0.05).sqrt();
        assert!((t - want).abs() < 1e-12);
    }

    #[test]
    fn threshold_limit_and_monotone_alpha() {
        let n = 50;
        let s = spectrum(
            (0..n)
                .map(|k| if k == 0 { 0.0 } else { 1.0 + k as f64 })
                .collect(),
        );
        let t = spectral_threshold(&s, 1e14, 1.0 - 1e-12, n).unwrap();
        assert!((t - (1.0 + 2f64.sqrt()) / n as f64).abs() < 1e-9);
        let mut prev = f64::INFINITY;
        for a in [0.01, 0.05, 0.1, 0.2, 0.5, 0.9] {
            let t = spectral_threshold(&s, 0.3, a, n).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn threshold_errors() {
        let s = spectrum(vec![0.0, 1.0]);
        assert!(spectral_threshold(&s, 1.0, 0.0, 2).is_err());
        assert!(spectral_threshold(&s, 1.0, 1.0, 2).is_err());
        assert!(spectral_threshold(&s, 1.0, 0.1, 3).is_err());
        let partial = SpectrumResult {
            eigenvalues: vec![0.0],
            mode: SpectrumMode::PartialIterative,
            n: 2,
            eigenvectors: None,
        };
        assert!(matches!(
            spectral_threshold(&partial, 1.0, 0.1, 2),
            Err(Error::PartialSpectrum { .. })
        ));
    }

    #[test]
    fn p_value_rank_formula() {
        let permuted: Vec<f64> = (0..99).map(|b| b as f64).collect();
        assert_eq!(permutation_p_value(1000.0, &permuted), 0.01);
        assert_eq!(permutation_p_value(-1.0, &permuted), 1.0);
        assert_eq!(permutation_p_value(98.0, &permuted), 0.02);
    }

    #[test]
    fn statistic_values() {
        assert_eq!(mean_square(&[0.0; 5]), 0.0);
        assert_eq!(mean_square(&[1.0; 7]), 1.0);
        assert!((mean_square(&[1.0, 2.0, 3.0]) - 14.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_response_has_unit_p_value() {
        let edges: Vec<_> = (0..19).map(|i| (i, i + 1, 1.0)).collect();
        let g =
            NeighborhoodGraph::from_upper_edges(20, 1.0, Arc::new(KernelSpec::uniform(1)), &edges)
                .unwrap();
        let pts = PointCloud::new((0..20).map(f64::from).collect(), 1).unwrap();
        let problem = SmoothingProblem::from_parts(Arc::new(pts), Arc::new(g));
        let res = gof_test_permutation_on(&problem, &[3.5; 20], 0.7, 0.05, 99, 1).unwrap();
        assert_eq!(res.p_value, Some(1.0));
        assert!(!res.reject);
        assert!(gof_test_permutation_on(&problem, &[3.5; 20], 0.7, 0.05, 98, 1).is_err());
    }

    #[test]
    fn critical_epsilon_interpolates() {
        let curve = PowerCurve {
            n: 10,
            rows: vec![
                rate_row(0.1, 10, 100),
                rate_row(0.2, 50, 100),
                rate_row(0.4, 90, 100),
            ],
            null_rejection_rate: 0.05,
            null_std_err: 0.0,
            rho: 1.0,
            r: 1.0,
        };
        let e = curve.critical_epsilon(0.7).unwrap();
        assert!((e - (0.2f64.ln() + 0.5 * 2f64.ln()).exp()).abs() < 1e-12);
        assert_eq!(curve.critical_epsilon(0.95), None);
    }
}
