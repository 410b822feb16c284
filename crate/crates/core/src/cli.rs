//! Command-line front end: `gen`, `fit`, `test`, `eigs` and `experiment`.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 solver failure,
//! 4 dense spectral cap exceeded. Errors go to standard error as one line
//! of JSON.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{resolve_tuning, SmoothingProblem, Task, TuningOverrides, TuningSpec};
use crate::experiments::{
    parse_n_grid, run_certificate_check, run_manifold_rate_experiment, run_rate_experiment,
    run_seminorm_check, run_spectral_envelope, run_testing_rate, run_type_one_error,
    run_variance_sum_check, CertificateConfig, ExperimentConfig, ExperimentKind, ExperimentTuning,
    OutputDir, RateCurve, SeminormConfig, SpectralEnvelopeConfig, TestingRateConfig, TypeOneConfig,
};
use crate::graph::graph_diagnostics;
use crate::io;
use crate::kernel::{KernelFamily, KernelSpec};
use crate::solver::{full_spectrum, partial_spectrum, Which};
use crate::synthetic::{make_replicate, DesignSpec, Domain, SignalSpec};
use crate::testing::{gof_test_permutation_on, gof_test_spectral_on, Calibration};

#[derive(Debug, Parser)]
#[command(
    name = "lapsmooth",
    version,
    about = "Laplacian smoothing on kernel neighborhood graphs"
)]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: String,
    /// Log progress to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic design and noisy responses.
    Gen(GenArgs),
    /// Fit the smoother to a point cloud and responses.
    Fit(FitArgs),
    /// Goodness-of-fit test of a zero regression function.
    Test(TestArgs),
    /// Laplacian eigenvalues of the neighborhood graph.
    Eigs(EigsArgs),
    /// Monte Carlo experiments.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignArg {
    Uniform,
    Circle,
    SwissRoll,
    Bump,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainArg {
    Unit,
    Symmetric,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalArg {
    Cosine,
    Linear,
    Zero,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub design: DesignArg,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "unit")]
    pub domain: DomainArg,
    #[arg(long, value_enum, default_value = "cosine")]
    pub signal: SignalArg,
    /// Cosine frequency `a` in `prod cos(a pi x_i)`.
    #[arg(long, default_value_t = 1.0)]
    pub frequency: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// JSON design spec; overrides the design flags.
    #[arg(long)]
    pub design_spec: Option<PathBuf>,
    /// JSON signal spec; overrides the signal flags.
    #[arg(long)]
    pub signal_spec: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub noise_sd: f64,
    /// Output directory for points.csv, y.csv, f0.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Points CSV: one row per point, no header.
    #[arg(long)]
    pub data: PathBuf,
    /// Graph radius, or `auto` for `c0 (log n / n)^{1/dim}`.
    #[arg(long, default_value = "auto")]
    pub r: String,
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    /// Dimension used by the tuning rules; defaults to the number of columns.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "uniform")]
    pub kernel: String,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Responses CSV: one value per row.
    #[arg(long)]
    pub response: PathBuf,
    /// Penalty, or `auto` for the estimation rule.
    #[arg(long, default_value = "auto")]
    pub rho: String,
    /// Sobolev radius used by the tuning rule.
    #[arg(long = "M", default_value_t = 1.0)]
    pub sobolev_radius: f64,
    /// Output CSV with columns `index,f_hat`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CalibrationArg {
    Spectral,
    Perm,
}

impl From<CalibrationArg> for Calibration {
    fn from(c: CalibrationArg) -> Self {
        match c {
            CalibrationArg::Spectral => Calibration::Spectral,
            CalibrationArg::Perm => Calibration::Permutation,
        }
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub response: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "spectral")]
    pub calibration: CalibrationArg,
    #[arg(long, default_value_t = 999)]
    pub n_perm: usize,
    /// Penalty, or `auto` for the testing rule.
    #[arg(long, default_value = "auto")]
    pub rho: String,
    #[arg(long = "M", default_value_t = 1.0)]
    pub sobolev_radius: f64,
    /// Output JSON with the test result.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EigsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Number of extremal eigenvalues; all of them when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "smallest")]
    pub which: WhichArg,
    /// Output CSV with columns `k,lambda`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WhichArg {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ExperimentName {
    Rates,
    Manifold,
    Spectral,
    Seminorm,
    Power,
    VarianceSums,
    Certificate,
    TypeOne,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TuningArg {
    Oracle,
    Theorem,
    Fixed,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    /// Dimension(s); a comma list for `spectral` and `variance-sums`.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// `lo:hi:logK`, `lo:hi:linK` or a comma list.
    #[arg(long)]
    pub n_grid: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum, default_value = "oracle")]
    pub tuning: TuningArg,
    /// Penalty for `--tuning fixed`.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 15)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 4.0)]
    pub decades: f64,
    #[arg(long = "M", default_value_t = 1.0)]
    pub sobolev_radius: f64,
    /// Radius constant; each experiment has its own default.
    #[arg(long)]
    pub c0: Option<f64>,
    /// Tuning dimension override (manifold negative control).
    #[arg(long)]
    pub dim_used: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub noise_sd: f64,
    #[arg(long, default_value = "uniform")]
    pub kernel: String,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value = "spectral")]
    pub calibration: CalibrationArg,
    #[arg(long, default_value_t = 199)]
    pub n_perm: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. } | Error::LanczosNotConverged { .. } | Error::Eigen(_) => 3,
        Error::Capacity { .. } | Error::PartialSpectrum { .. } => 4,
        _ => 2,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => "invalid-input",
        Error::Capacity { .. } => "capacity",
        Error::PartialSpectrum { .. } => "partial-spectrum",
        Error::NotConverged { .. } | Error::LanczosNotConverged { .. } | Error::Eigen(_) => {
            "solver"
        }
        Error::Unsupported(_) => "unsupported",
        Error::Config(_) => "config",
        Error::Io { .. } | Error::Csv { .. } | Error::Json(_) => "io",
    }
}

fn print_error(kind: &str, message: &str, code: i32) {
    let line = serde_json::json!({ "error": kind, "message": message.trim(), "exit_code": code });
    eprintln!("{line}");
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let message = e.render().to_string();
            let message: Vec<&str> = message
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            print_error("usage", &message.join(" "), 2);
            return 2;
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            print_error(error_kind(&e), &e.to_string(), code);
            code
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let threads = match cli.threads.as_str() {
        "auto" => 0,
        s => match s.parse::<usize>() {
            Ok(t) if t > 0 => t,
            _ => {
                return Err(Error::Config(format!(
                    "--threads must be a positive integer or `auto`, got `{s}`"
                )))
            }
        },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Gen(a) => gen(a, cli.seed),
        Command::Fit(a) => fit(a),
        Command::Test(a) => test(a, cli.seed),
        Command::Eigs(a) => eigs(a),
        Command::Experiment(a) => experiment(a, cli.seed),
    })
}

fn parse_auto(name: &str, value: &str) -> Result<Option<f64>> {
    if value == "auto" {
        return Ok(None);
    }
    value.parse::<f64>().map(Some).map_err(|_| {
        Error::Config(format!(
            "--{name} must be a number or `auto`, got `{value}`"
        ))
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    out.with_file_name(format!("{stem}.manifest.json"))
}

#[derive(Serialize)]
struct RunManifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: C,
    outputs: Vec<crate::experiments::OutputFile>,
}

fn write_run_manifest<C: Serialize>(out: &Path, command: &str, config: C) -> Result<()> {
    let bytes = std::fs::read(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        outputs: vec![crate::experiments::OutputFile {
            name: out
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: crate::experiments::git_blob_sha256(&bytes),
        }],
    };
    io::write_json(manifest_path(out), &manifest)
}

struct LoadedGraph {
    problem: SmoothingProblem,
    kernel: KernelSpec,
    dim: usize,
}

fn load_graph(
    a: &GraphArgs,
    y_len: Option<usize>,
    task: Task,
    sobolev_radius: f64,
    rho: Option<f64>,
) -> Result<(LoadedGraph, TuningSpec)> {
    let points = io::read_points_csv(&a.data)?;
    if let Some(len) = y_len {
        Error::check_len(points.len(), len)?;
    }
    let dim = a.dim.unwrap_or(points.dim());
    let points = if dim < points.dim() {
        points.with_intrinsic_dim(dim)?
    } else {
        points
    };
    let kernel = KernelSpec::new(KernelFamily::parse(&a.kernel)?, points.dim())?;
    let overrides = TuningOverrides {
        rho,
        r: parse_auto("r", &a.r)?,
        c0: a.c0,
        oracle_grid: false,
    };
    let tuning = resolve_tuning(points.len(), dim, sobolev_radius, task, &overrides)?;
    let problem = SmoothingProblem::new(points, tuning.r, &kernel)?;
    let diag = graph_diagnostics(problem.graph());
    if !diag.connected {
        log::warn!("graph has {} connected components", diag.components);
    }
    Ok((
        LoadedGraph {
            problem,
            kernel,
            dim,
        },
        tuning,
    ))
}

fn gen(a: &GenArgs, seed: u64) -> Result<()> {
    let domain = match a.domain {
        DomainArg::Unit => Domain::Unit,
        DomainArg::Symmetric => Domain::Symmetric,
    };
    let design = match &a.design_spec {
        Some(path) => io::read_json::<DesignSpec>(path)?,
        None => match a.design {
            DesignArg::Uniform => DesignSpec::uniform(a.d, domain),
            DesignArg::Circle => DesignSpec::circle(a.d),
            DesignArg::SwissRoll => DesignSpec::swiss_roll(),
            DesignArg::Bump => DesignSpec::lipschitz_bump(a.d, 0.5, 0.5),
        },
    };
    let signal = match &a.signal_spec {
        Some(path) => io::read_json::<SignalSpec>(path)?,
        None => match a.signal {
            SignalArg::Cosine => SignalSpec::cosine(design.d, a.frequency, a.amplitude),
            SignalArg::Linear => SignalSpec::linear(design.d, 0, a.amplitude),
            SignalArg::Zero => SignalSpec::zero(design.d),
        },
    };
    let ds = make_replicate(&design, &signal, a.n, seed, 0, a.noise_sd)?;
    let mut out = OutputDir::create(&a.out)?;
    out.write_bytes("points.csv", io::format_points_csv(&ds.points).as_bytes())?;
    out.write_bytes("y.csv", io::format_vector_csv(&ds.y).as_bytes())?;
    out.write_bytes("f0.csv", io::format_vector_csv(&ds.f0_at_points).as_bytes())?;
    #[derive(Serialize)]
    struct GenConfig<'a> {
        design: &'a DesignSpec,
        signal: &'a SignalSpec,
        n: usize,
        noise_sd: f64,
        seed: u64,
    }
    out.finish(
        "gen",
        &GenConfig {
            design: &design,
            signal: &signal,
            n: a.n,
            noise_sd: a.noise_sd,
            seed,
        },
    )?;
    Ok(())
}

fn fit(a: &FitArgs) -> Result<()> {
    let y = io::read_vector_csv(&a.response)?;
    let rho = parse_auto("rho", &a.rho)?;
    let (g, tuning) = load_graph(
        &a.graph,
        Some(y.len()),
        Task::Estimation,
        a.sobolev_radius,
        rho,
    )?;
    let fit = g.problem.fit(&y, &tuning)?;
    io::write_fit_csv(&a.out, &fit.f_hat)?;
    #[derive(Serialize)]
    struct FitConfig<'a> {
        data: &'a Path,
        response: &'a Path,
        kernel: &'a KernelFamily,
        dim_used: usize,
        tuning: &'a TuningSpec,
        solve: &'a crate::solver::SolveReport,
    }
    write_run_manifest(
        &a.out,
        "fit",
        FitConfig {
            data: &a.graph.data,
            response: &a.response,
            kernel: g.kernel.family(),
            dim_used: g.dim,
            tuning: &tuning,
            solve: &fit.solve,
        },
    )
}

fn test(a: &TestArgs, seed: u64) -> Result<()> {
    let y = io::read_vector_csv(&a.response)?;
    let rho = parse_auto("rho", &a.rho)?;
    let (g, tuning) = load_graph(
        &a.graph,
        Some(y.len()),
        Task::Testing,
        a.sobolev_radius,
        rho,
    )?;
    let result = match Calibration::from(a.calibration) {
        Calibration::Spectral => {
            let spectrum = full_spectrum(g.problem.graph())?;
            gof_test_spectral_on(&g.problem, &y, tuning.rho, a.alpha, &spectrum)?
        }
        Calibration::Permutation => {
            gof_test_permutation_on(&g.problem, &y, tuning.rho, a.alpha, a.n_perm, seed)?
        }
    };
    io::write_json(&a.out, &result)?;
    #[derive(Serialize)]
    struct TestConfig<'a> {
        data: &'a Path,
        response: &'a Path,
        kernel: &'a KernelFamily,
        tuning: &'a TuningSpec,
        alpha: f64,
        n_perm: usize,
        seed: u64,
    }
    write_run_manifest(
        &a.out,
        "test",
        TestConfig {
            data: &a.graph.data,
            response: &a.response,
            kernel: g.kernel.family(),
            tuning: &tuning,
            alpha: a.alpha,
            n_perm: a.n_perm,
            seed,
        },
    )
}

fn eigs(a: &EigsArgs) -> Result<()> {
    let (g, tuning) = load_graph(&a.graph, None, Task::Estimation, 1.0, None)?;
    let which = match a.which {
        WhichArg::Smallest => Which::Smallest,
        WhichArg::Largest => Which::Largest,
    };
    let spectrum = match a.k {
        None => full_spectrum(g.problem.graph())?,
        Some(k) => partial_spectrum(g.problem.graph(), k, which)?,
    };
    let file = std::fs::File::create(&a.out).map_err(|source| Error::Io {
        path: a.out.clone(),
        source,
    })?;
    let mut w = std::io::BufWriter::new(file);
    spectrum
        .write_csv(&mut w)
        .and_then(|_| std::io::Write::flush(&mut w))
        .map_err(|source| Error::Io {
            path: a.out.clone(),
            source,
        })?;
    #[derive(Serialize)]
    struct EigsConfig<'a> {
        data: &'a Path,
        kernel: &'a KernelFamily,
        r: f64,
        k: Option<usize>,
        which: &'static str,
        mode: crate::solver::SpectrumMode,
    }
    write_run_manifest(
        &a.out,
        "eigs",
        EigsConfig {
            data: &a.graph.data,
            kernel: g.kernel.family(),
            r: tuning.r,
            k: a.k,
            which: match which {
                Which::Smallest => "smallest",
                Which::Largest => "largest",
            },
            mode: spectrum.mode,
        },
    )
}

fn num(v: f64) -> String {
    v.to_string()
}

fn rate_outputs(out: &mut OutputDir, curve: &RateCurve) -> Result<()> {
    out.write_table(
        "curve.csv",
        &["n", "mean_mse", "stderr"],
        curve
            .rows
            .iter()
            .map(|r| vec![r.n.to_string(), num(r.mean_error), num(r.std_error)]),
    )?;
    out.write_json("slope.json", curve)?;
    Ok(())
}

fn experiment(a: &ExperimentArgs, seed: u64) -> Result<()> {
    let kernel = KernelFamily::parse(&a.kernel)?;
    let grid = |default: &str| parse_n_grid(a.n_grid.as_deref().unwrap_or(default));
    let first_d = a.d.first().copied().unwrap_or(1);
    let mut out = OutputDir::create(&a.out)?;
    let tuning = match a.tuning {
        TuningArg::Oracle => ExperimentTuning::Oracle {
            points: a.grid_points,
            decades: a.decades,
        },
        TuningArg::Theorem => ExperimentTuning::Theorem,
        TuningArg::Fixed => ExperimentTuning::Fixed {
            rho: a
                .rho
                .ok_or_else(|| Error::Config("--tuning fixed needs --rho".into()))?,
        },
    };
    let alpha = a.alpha.first().copied().unwrap_or(0.05);
    match a.name {
        ExperimentName::Rates | ExperimentName::Manifold => {
            let n_grid = grid("1000:10000:log5")?;
            let reps = a.reps.unwrap_or(5);
            let base = if a.name == ExperimentName::Rates {
                ExperimentConfig::rates(first_d, n_grid, reps, seed)
            } else {
                ExperimentConfig::manifold_circle(first_d.max(2), n_grid, reps, seed)
            };
            let cfg = ExperimentConfig {
                tuning,
                sobolev_radius: a.sobolev_radius,
                c0: a.c0.unwrap_or(base.c0),
                dim_used: a.dim_used,
                kernel,
                noise_sd: a.noise_sd,
                ..base
            };
            let curve = if cfg.kind == ExperimentKind::ManifoldRate {
                run_manifold_rate_experiment(&cfg)?
            } else {
                run_rate_experiment(&cfg)?
            };
            rate_outputs(&mut out, &curve)?;
            out.finish(
                if cfg.kind == ExperimentKind::ManifoldRate {
                    "manifold-rate"
                } else {
                    "rate-estimation"
                },
                &cfg,
            )?;
        }
        ExperimentName::Spectral => {
            let cfg = SpectralEnvelopeConfig {
                n_list: grid("500,1000,2000")?,
                d_list: if a.d.is_empty() {
                    vec![1, 2]
                } else {
                    a.d.clone()
                },
                c0: a.c0.unwrap_or(2.0),
                kernel,
                seed,
                ..Default::default()
            };
            let rows = run_spectral_envelope(&cfg)?;
            out.write_table(
                "envelope.csv",
                &[
                    "d",
                    "n",
                    "r",
                    "lambda_1",
                    "lambda_max",
                    "max_degree",
                    "min_ratio",
                    "max_ratio",
                    "slope",
                    "slope_stderr",
                ],
                rows.iter().map(|r| {
                    vec![
                        r.d.to_string(),
                        r.n.to_string(),
                        num(r.r),
                        num(r.lambda_1),
                        num(r.lambda_max),
                        num(r.max_degree),
                        num(r.min_ratio),
                        num(r.max_ratio),
                        num(r.slope),
                        num(r.slope_std_err),
                    ]
                }),
            )?;
            for r in &rows {
                out.write_table(
                    &format!("spectrum_d{}_n{}.csv", r.d, r.n),
                    &["k", "lambda"],
                    r.eigenvalues
                        .iter()
                        .enumerate()
                        .map(|(k, l)| vec![(k + 1).to_string(), num(*l)]),
                )?;
            }
            out.finish("spectral-envelope", &cfg)?;
        }
        ExperimentName::Seminorm => {
            let mut cfg =
                SeminormConfig::linear(first_d, grid("500,1000,2000")?, a.reps.unwrap_or(10), seed);
            cfg.c0 = a.c0.unwrap_or(cfg.c0);
            cfg.kernel = kernel;
            let report = run_seminorm_check(&cfg)?;
            out.write_table(
                "seminorm.csv",
                &["n", "replicate", "r", "ratio"],
                report.rows.iter().map(|r| {
                    vec![
                        r.n.to_string(),
                        r.replicate.to_string(),
                        num(r.r),
                        num(r.ratio),
                    ]
                }),
            )?;
            out.write_table(
                "summary.csv",
                &["n", "mean", "variance", "min", "max"],
                report.summary.iter().map(|s| {
                    vec![
                        s.n.to_string(),
                        num(s.mean),
                        num(s.variance),
                        num(s.min),
                        num(s.max),
                    ]
                }),
            )?;
            out.finish("seminorm", &cfg)?;
        }
        ExperimentName::Power => {
            let mut cfg = TestingRateConfig::one_dimensional(
                grid("250,500,1000,2000")?,
                a.reps.unwrap_or(100),
                seed,
            );
            if first_d != 1 {
                cfg.design = DesignSpec::uniform(first_d, Domain::Unit);
                cfg.shape = SignalSpec::cosine(first_d, 1.0, 1.0);
            }
            cfg.alpha = alpha;
            cfg.sobolev_radius = a.sobolev_radius;
            cfg.c0 = a.c0.unwrap_or(cfg.c0);
            cfg.kernel = kernel;
            let report = run_testing_rate(&cfg)?;
            out.write_table(
                "power.csv",
                &["n", "epsilon", "rejection_rate", "mc_stderr"],
                report.curves.iter().flat_map(|c| {
                    c.rows.iter().map(move |r| {
                        vec![
                            c.n.to_string(),
                            num(r.epsilon),
                            num(r.rejection_rate),
                            num(r.mc_std_err),
                        ]
                    })
                }),
            )?;
            out.write_table(
                "critical.csv",
                &["n", "epsilon"],
                report
                    .critical
                    .iter()
                    .map(|(n, e)| vec![n.to_string(), e.map(num).unwrap_or_default()]),
            )?;
            out.write_json("slope.json", &report)?;
            out.finish("power", &cfg)?;
        }
        ExperimentName::VarianceSums => {
            let d_list = if a.d.is_empty() {
                vec![1, 2, 3, 4]
            } else {
                a.d.clone()
            };
            let n = grid("1000")?.last().copied().unwrap_or(1000);
            let rows = run_variance_sum_check(&d_list, &[], n)?;
            out.write_table(
                "variance_sums.csv",
                &[
                    "d", "t", "n", "sum2", "lower2", "upper2", "sum4", "lower4", "upper4", "holds",
                ],
                rows.iter().map(|r| {
                    vec![
                        r.d.to_string(),
                        num(r.t),
                        r.n.to_string(),
                        num(r.sum2),
                        num(r.lower2),
                        num(r.upper2),
                        num(r.sum4),
                        r.lower4.map(num).unwrap_or_default(),
                        r.upper4.map(num).unwrap_or_default(),
                        r.holds().to_string(),
                    ]
                }),
            )?;
            #[derive(Serialize)]
            struct VarianceConfig {
                d_list: Vec<usize>,
                n: usize,
            }
            out.finish("variance-sums", &VarianceConfig { d_list, n })?;
        }
        ExperimentName::Certificate => {
            let n = grid("500")?.last().copied().unwrap_or(500);
            let mut cfg = CertificateConfig::one_dimensional(n, a.reps.unwrap_or(200), seed);
            cfg.sobolev_radius = a.sobolev_radius;
            cfg.c0 = a.c0.unwrap_or(cfg.c0);
            cfg.kernel = kernel;
            let report = run_certificate_check(&cfg)?;
            out.write_table(
                "certificate.csv",
                &[
                    "replicate",
                    "mse",
                    "bias_bound",
                    "variance_bound",
                    "probability",
                    "holds",
                ],
                report.rows.iter().map(|r| {
                    vec![
                        r.replicate.to_string(),
                        num(r.mse),
                        num(r.bias_bound),
                        num(r.variance_bound),
                        num(r.probability),
                        r.holds.to_string(),
                    ]
                }),
            )?;
            out.finish("certificate", &cfg)?;
        }
        ExperimentName::TypeOne => {
            let n = grid("500")?.last().copied().unwrap_or(500);
            let mut cfg = TypeOneConfig::one_dimensional(
                n,
                a.reps.unwrap_or(500),
                a.calibration.into(),
                seed,
            );
            cfg.alphas = a.alpha.clone();
            cfg.n_perm = a.n_perm;
            cfg.sobolev_radius = a.sobolev_radius;
            cfg.c0 = a.c0.unwrap_or(cfg.c0);
            cfg.kernel = kernel;
            let report = run_type_one_error(&cfg)?;
            out.write_table(
                "type_one.csv",
                &["alpha", "rejection_rate", "mc_stderr"],
                report
                    .rows
                    .iter()
                    .map(|r| vec![num(r.alpha), num(r.rejection_rate), num(r.mc_std_err)]),
            )?;
            out.finish("type-one", &cfg)?;
        }
    }
    Ok(())
}
