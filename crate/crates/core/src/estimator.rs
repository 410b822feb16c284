//! The Laplacian smoothing estimator
//! `f_hat = argmin_f ||Y - f||^2 + rho f^T L f = (I + rho L)^{-1} Y`,
//! its tuning rules, error measures and Voronoi extension.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, NeighborhoodGraph};
use crate::kernel::KernelSpec;
use crate::points::PointCloud;
use crate::solver::{solve_smoothing_system, SolveOptions, SolveReport, SpectrumResult};
use crate::spatial::KdTree;
use crate::synthetic::{sample_design_from, DesignSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuningMode {
    TheoremRule,
    Fixed,
    OracleGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Estimation,
    Testing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum RadiusRule {
    /// `r = c0 (log n / n)^{1 / dim}`
    Connectivity {
        c0: f64,
    },
    Explicit,
}

/// Resolved `(rho, r)` with the inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningSpec {
    pub mode: TuningMode,
    pub task: Task,
    /// Sobolev radius `M`.
    pub sobolev_radius: f64,
    /// `d`, or `m` under the manifold hypothesis.
    pub dim_used: usize,
    pub n: usize,
    pub rho: f64,
    pub r: f64,
    pub r_rule: RadiusRule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningOverrides {
    pub rho: Option<f64>,
    pub r: Option<f64>,
    pub c0: f64,
    /// Marks the spec as an oracle-grid center; `rho` still resolves to the
    /// theorem rule.
    pub oracle_grid: bool,
}

impl Default for TuningOverrides {
    fn default() -> Self {
        Self {
            rho: None,
            r: None,
            c0: 2.0,
            oracle_grid: false,
        }
    }
}

/// Connectivity-threshold radius `c0 (log n / n)^{1/dim}`.
pub fn connectivity_radius(n: usize, dim: usize, c0: f64) -> f64 {
    let n = n as f64;
    c0 * (n.ln() / n).powf(1.0 / dim as f64)
}

/// Penalty weight prescribed by the rate theorems for the given task.
pub fn theorem_rho(n: usize, dim: usize, sobolev_radius: f64, task: Task, r: f64) -> f64 {
    let nf = n as f64;
    let m = sobolev_radius;
    let df = dim as f64;
    let scale = 1.0 / (nf * r.powi(dim as i32 + 2));
    match task {
        Task::Estimation if dim < 4 => {
            m.powf(-4.0 / (2.0 + df)) * scale * nf.powf(-2.0 / (2.0 + df))
        }
        Task::Estimation if dim == 4 => m.powf(-2.0 / 3.0) * scale * (nf.ln() / nf).powf(1.0 / 3.0),
        Task::Estimation => m.powf(-2.0 / 3.0) * scale * nf.powf(-4.0 / (3.0 * df)),
        Task::Testing => scale * nf.powf(-4.0 / (4.0 + df)) * m.powf(-8.0 / (4.0 + df)),
    }
}

/// Upper end of the admissible radius range (ignoring the constant cap).
pub fn radius_upper_endpoint(n: usize, dim: usize, sobolev_radius: f64, task: Task) -> Option<f64> {
    let nf = n as f64;
    let df = dim as f64;
    let m = sobolev_radius;
    match task {
        Task::Estimation if dim < 4 => {
            Some(m.powf((df - 4.0) / (4.0 + 2.0 * df)) * nf.powf(-3.0 / (4.0 + 2.0 * df)))
        }
        Task::Testing if dim < 4 => {
            Some(m.powf((df - 8.0) / (8.0 + 2.0 * df)) * nf.powf((df - 20.0) / (32.0 + 8.0 * df)))
        }
        _ => None,
    }
}

pub fn resolve_tuning(
    n: usize,
    dim_used: usize,
    sobolev_radius: f64,
    task: Task,
    overrides: &TuningOverrides,
) -> Result<TuningSpec> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    if dim_used == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(sobolev_radius.is_finite() && sobolev_radius > 0.0) {
        return Err(Error::invalid(format!(
            "Sobolev radius M must be positive, got {sobolev_radius}"
        )));
    }
    let (r, r_rule) = match overrides.r {
        Some(r) if r.is_finite() && r > 0.0 => (r, RadiusRule::Explicit),
        Some(r) => return Err(Error::invalid(format!("radius must be positive, got {r}"))),
        None => {
            if !(overrides.c0 > 0.0 && overrides.c0.is_finite()) {
                return Err(Error::invalid(format!(
                    "c0 must be positive, got {}",
                    overrides.c0
                )));
            }
            (
                connectivity_radius(n, dim_used, overrides.c0),
                RadiusRule::Connectivity { c0: overrides.c0 },
            )
        }
    };
    let (rho, mode) = match overrides.rho {
        Some(rho) if rho.is_finite() && rho >= 0.0 => (rho, TuningMode::Fixed),
        Some(rho) => {
            return Err(Error::invalid(format!(
                "rho must be nonnegative, got {rho}"
            )))
        }
        None if overrides.oracle_grid => (
            theorem_rho(n, dim_used, sobolev_radius, task, r),
            TuningMode::OracleGrid,
        ),
        None => (
            theorem_rho(n, dim_used, sobolev_radius, task, r),
            TuningMode::TheoremRule,
        ),
    };

    let mut warnings = Vec::new();
    if let Some(upper) = radius_upper_endpoint(n, dim_used, sobolev_radius, task) {
        if r > upper {
            warnings.push(format!(
                "radius {r:.4} exceeds the admissible upper endpoint {upper:.4}"
            ));
        }
    }
    if task == Task::Testing && dim_used >= 4 {
        warnings.push(format!(
            "testing rule is only calibrated for dim < 4 (got {dim_used})"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(TuningSpec {
        mode,
        task,
        sobolev_radius,
        dim_used,
        n,
        rho,
        r,
        r_rule,
        warnings,
    })
}

/// `count` log-spaced penalties spanning `decades` decades centered at `center`.
pub fn rho_grid(center: f64, count: usize, decades: f64) -> Vec<f64> {
    if count == 1 {
        return vec![center];
    }
    (0..count)
        .map(|i| {
            let e = -0.5 * decades + decades * i as f64 / (count - 1) as f64;
            center * 10f64.powf(e)
        })
        .collect()
}

/// A design with its neighborhood graph, reusable across responses and
/// penalties.
#[derive(Debug, Clone)]
pub struct SmoothingProblem {
    points: Arc<PointCloud>,
    graph: Arc<NeighborhoodGraph>,
    solve_opts: SolveOptions,
}

impl SmoothingProblem {
    pub fn new(points: PointCloud, r: f64, kernel: &KernelSpec) -> Result<Self> {
        let graph = build_graph(&points, r, kernel)?;
        Ok(Self::from_parts(Arc::new(points), Arc::new(graph)))
    }

    pub fn from_parts(points: Arc<PointCloud>, graph: Arc<NeighborhoodGraph>) -> Self {
        Self {
            points,
            graph,
            solve_opts: SolveOptions::default(),
        }
    }

    pub fn with_solve_options(mut self, opts: SolveOptions) -> Self {
        self.solve_opts = opts;
        self
    }

    pub fn graph(&self) -> &Arc<NeighborhoodGraph> {
        &self.graph
    }

    pub fn points(&self) -> &Arc<PointCloud> {
        &self.points
    }

    /// `(I + rho L)^{-1} y`; non-convergence is an error.
    pub fn smooth(&self, y: &[f64], rho: f64) -> Result<(Vec<f64>, SolveReport)> {
        let (f, report) = solve_smoothing_system(&self.graph, y, rho, &self.solve_opts)?;
        if !report.converged {
            return Err(Error::NotConverged {
                iterations: report.iterations,
                residual: report.final_residual,
                tol: self.solve_opts.tol,
            });
        }
        Ok((f, report))
    }

    pub fn fit(&self, y: &[f64], tuning: &TuningSpec) -> Result<SmoothingFit> {
        let (f_hat, solve) = self.smooth(y, tuning.rho)?;
        Ok(SmoothingFit {
            f_hat,
            tuning: tuning.clone(),
            solve,
            graph: Arc::clone(&self.graph),
            points: Arc::clone(&self.points),
            in_sample_mse: None,
        })
    }
}

/// Fitted values on the design with everything needed to inspect them.
#[derive(Debug, Clone)]
pub struct SmoothingFit {
    pub f_hat: Vec<f64>,
    pub tuning: TuningSpec,
    pub solve: SolveReport,
    pub graph: Arc<NeighborhoodGraph>,
    pub points: Arc<PointCloud>,
    pub in_sample_mse: Option<f64>,
}

impl SmoothingFit {
    pub fn len(&self) -> usize {
        self.f_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_hat.is_empty()
    }

    /// Fills `in_sample_mse` against the true regression function.
    pub fn with_truth(mut self, f0_at_points: &[f64]) -> Result<Self> {
        self.in_sample_mse = Some(in_sample_mse(&self, f0_at_points)?);
        Ok(self)
    }

    /// `||y - f_hat||^2 + rho f_hat^T L f_hat`.
    pub fn objective(&self, y: &[f64]) -> Result<f64> {
        objective(&self.graph, y, &self.f_hat, self.tuning.rho)
    }

    /// Sup norm of the objective gradient `2 (f_hat - y) + 2 rho L f_hat`.
    pub fn gradient_inf_norm(&self, y: &[f64]) -> Result<f64> {
        Error::check_len(self.len(), y.len())?;
        let lf = self.graph.apply_laplacian(&self.f_hat)?;
        Ok(self
            .f_hat
            .iter()
            .zip(y)
            .zip(&lf)
            .map(|((f, y), l)| (2.0 * (f - y) + 2.0 * self.tuning.rho * l).abs())
            .fold(0.0, f64::max))
    }
}

/// Builds the graph at `tuning.r` and solves the smoothing system.
pub fn fit(
    points: &PointCloud,
    y: &[f64],
    tuning: &TuningSpec,
    kernel: &KernelSpec,
) -> Result<SmoothingFit> {
    Error::check_len(points.len(), y.len())?;
    SmoothingProblem::new(points.clone(), tuning.r, kernel)?.fit(y, tuning)
}

/// Penalized least-squares objective at an arbitrary candidate `f`.
pub fn objective(g: &NeighborhoodGraph, y: &[f64], f: &[f64], rho: f64) -> Result<f64> {
    Error::check_len(g.len(), y.len())?;
    let fit: f64 = y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(fit + rho * g.quadratic_form(f)?)
}

/// `(1/n) sum_i (f_hat_i - f_0(X_i))^2`.
pub fn in_sample_mse(fit: &SmoothingFit, f0_at_points: &[f64]) -> Result<f64> {
    mean_squared_difference(&fit.f_hat, f0_at_points)
}

pub fn mean_squared_difference(a: &[f64], b: &[f64]) -> Result<f64> {
    Error::check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::invalid("empty vectors"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64)
}

/// Piecewise-constant extension of a fit over the Voronoi cells of the design.
#[derive(Debug, Clone)]
pub struct VoronoiExtension {
    anchors: Arc<PointCloud>,
    values: Vec<f64>,
    tree: KdTree,
}

impl VoronoiExtension {
    pub fn new(anchors: Arc<PointCloud>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("cannot extend an empty fit"));
        }
        Error::check_len(anchors.len(), values.len())?;
        let tree = KdTree::build(&anchors);
        Ok(Self {
            anchors,
            values,
            tree,
        })
    }

    /// Value at the nearest anchor; equidistant anchors resolve to the lowest index.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Error::check_len(self.anchors.dim(), x.len())?;
        let (j, _) = self.tree.nearest(&self.anchors, x);
        Ok(self.values[j])
    }

    /// Monte Carlo estimate of `||f_ext - f_0||^2_{L^2(P)}` with `samples`
    /// fresh draws from `design`.
    pub fn l2_error_mc(
        &self,
        truth: impl Fn(&[f64]) -> f64,
        design: &DesignSpec,
        samples: usize,
        seed: u64,
    ) -> Result<f64> {
        let mut rng = crate::rng::stream(seed, crate::rng::Purpose::MonteCarlo, 0);
        let (pts, _) = sample_design_from(design, samples, &mut rng)?;
        let mut total = 0.0;
        for x in pts.iter() {
            let diff = self.evaluate(x)? - truth(x);
            total += diff * diff;
        }
        Ok(total / samples as f64)
    }
}

pub fn extend_voronoi(fit: &SmoothingFit) -> Result<VoronoiExtension> {
    VoronoiExtension::new(Arc::clone(&fit.points), fit.f_hat.clone())
}

/// High-probability bias and variance terms for the in-sample error at a
/// fixed graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasVarianceBound {
    /// `(2 rho / n) f_0^T L f_0`
    pub bias_bound: f64,
    /// `(10 / n) sum_k (rho lambda_k + 1)^{-2}`
    pub variance_bound: f64,
    /// `1 - exp(-sum_k (rho lambda_k + 1)^{-2})`
    pub probability: f64,
}

impl BiasVarianceBound {
    pub fn total(&self) -> f64 {
        self.bias_bound + self.variance_bound
    }

    pub fn holds_for(&self, mse: f64) -> bool {
        mse <= self.total()
    }
}

pub fn bias_variance_certificate(
    fit: &SmoothingFit,
    f0_at_points: &[f64],
    spectrum: &SpectrumResult,
) -> Result<BiasVarianceBound> {
    let n = fit.len();
    Error::check_len(n, f0_at_points.len())?;
    Error::check_len(n, spectrum.n)?;
    spectrum.require_full("the bias/variance certificate")?;
    let rho = fit.tuning.rho;
    let s2 = spectrum.shrinkage_power_sum(rho, 2);
    let nf = n as f64;
    Ok(BiasVarianceBound {
        bias_bound: 2.0 * rho / nf * fit.graph.quadratic_form(f0_at_points)?,
        variance_bound: 10.0 / nf * s2,
        probability: 1.0 - (-s2).exp(),
    })
}
