mod common;

use common::*;
use lapsmooth::experiments::*;
use lapsmooth::graph::build_graph;
use lapsmooth::kernel::KernelSpec;
use lapsmooth::synthetic::{sample_design, DesignSpec, Domain, SignalSpec};
use rand_distr::{Distribution, StandardNormal};

#[test]
fn slope_of_exact_power_law() {
    let rows: Vec<(f64, f64)> = [100.0, 300.0, 1000.0, 3000.0, 10000.0]
        .iter()
        .map(|&n: &f64| (n, 4.2 * n.powf(-2.0 / 3.0)))
        .collect();
    let (slope, se) = fit_loglog_slope(&rows).unwrap();
    assert!((slope + 2.0 / 3.0).abs() < 1e-12);
    assert!(se < 1e-12);
    let flat: Vec<(f64, f64)> = rows.iter().map(|&(n, _)| (n, 0.3)).collect();
    assert!(fit_loglog_slope(&flat).unwrap().0.abs() < 1e-15);
}

#[test]
fn slope_fit_errors() {
    assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    assert!(fit_loglog_slope(&[(2.0, 1.0); 4]).is_err());
}

#[test]
fn slope_standard_error_covers_truth() {
    let ns = [500.0f64, 1000.0, 2000.0, 4000.0, 8000.0, 16000.0];
    let covered = (0..100)
        .filter(|&seed| {
            let mut r = rng(seed);
            let rows: Vec<(f64, f64)> = ns
                .iter()
                .map(|&n| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    (n, n.powf(-0.5) * (0.2 * z).exp())
                })
                .collect();
            let (slope, se) = fit_loglog_slope(&rows).unwrap();
            (slope + 0.5).abs() <= 2.0 * se
        })
        .count();
    assert!(covered >= 90, "{covered}/100");
}

#[test]
fn n_grid_parsing() {
    assert_eq!(
        parse_n_grid("1000:10000:log5").unwrap(),
        vec![1000, 1778, 3162, 5623, 10000]
    );
    assert_eq!(
        parse_n_grid("100:400:lin4").unwrap(),
        vec![100, 200, 300, 400]
    );
    assert_eq!(parse_n_grid("250, 500,1000").unwrap(), vec![250, 500, 1000]);
    assert!(parse_n_grid("1000:10").is_err());
    assert!(parse_n_grid("abc").is_err());
}

#[test]
fn noiseless_interpolation_has_zero_error() {
    let mut cfg = ExperimentConfig::rates(1, vec![100, 200, 400, 800], 3, 1)
        .with_tuning(ExperimentTuning::Fixed { rho: 0.0 });
    cfg.noise_sd = 0.0;
    let curve = run_rate_experiment(&cfg).unwrap();
    assert!(curve.rows.iter().all(|r| r.mean_error == 0.0));
    assert_eq!(curve.fitted_slope, None);
}

#[test]
fn rate_config_validation() {
    let bad_reps = ExperimentConfig::rates(1, vec![100, 200, 400, 800], 2, 1);
    assert!(run_rate_experiment(&bad_reps).is_err());
    let short = ExperimentConfig::rates(1, vec![100, 200, 400], 3, 1);
    assert!(run_rate_experiment(&short).is_err());
    let unsorted = ExperimentConfig::rates(1, vec![100, 400, 200, 800], 3, 1);
    assert!(run_rate_experiment(&unsorted).is_err());
    let cube = ExperimentConfig::rates(2, vec![100, 200, 400, 800], 3, 1);
    assert!(run_manifold_rate_experiment(&cube).is_err());
}

#[test]
fn small_rate_curve_decreases() {
    let cfg = ExperimentConfig::rates(1, vec![200, 400, 800, 1600], 5, 2);
    let curve = run_rate_experiment(&cfg).unwrap();
    assert!((curve.reference_slope + 2.0 / 3.0).abs() < 1e-15);
    assert!(curve.fitted_slope.unwrap() < 0.0);
    assert!(curve.non_decreasing_pairs(1.0).is_empty());
}

#[test]
fn experiments_ignore_thread_count() {
    let cfg = ExperimentConfig::rates(2, vec![100, 150, 200, 300], 4, 3);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_rate_experiment(&cfg).unwrap())
    };
    assert_eq!(run(1), run(2));
    assert_eq!(
        run_rate_experiment(&cfg).unwrap(),
        run_rate_experiment(&cfg).unwrap()
    );
}

#[test]
fn variance_sum_examples() {
    let row = variance_sum_row(2, 0.01, 1000).unwrap();
    let direct: f64 = (2..=1000).map(|k| (0.01 * k as f64 + 1.0).powi(-2)).sum();
    assert!((row.sum2 - direct).abs() < 1e-12);
    assert!((row.lower2 - 11.5).abs() < 1e-12);
    assert!((row.upper2 - 400.0).abs() < 1e-12);
    assert!(row.holds());

    let row4 = variance_sum_row(4, 0.1, 1000).unwrap();
    let direct4: f64 = (2..=1000)
        .map(|k| (0.1 * (k as f64).sqrt() + 1.0).powi(-2))
        .sum();
    assert!((row4.sum2 - direct4).abs() < 1e-10);
    assert!((row4.upper2 - (100.0 + 1000f64.ln() / 0.01)).abs() < 1e-9);
    assert!(row4.holds(), "{row4:?}");

    let edge = variance_sum_row(2, 1.0, 1000).unwrap();
    assert!(edge.lower2 <= 0.0);
    assert!(edge.holds());
}

#[test]
fn variance_sums_hold_everywhere() {
    for d in 1..=4 {
        let grid = default_t_grid(d, 1000);
        assert_eq!(grid.len(), 10);
        for row in run_variance_sum_check(&[d], &grid, 1000).unwrap() {
            assert!(row.holds(), "{row:?}");
            assert!(row.margin() >= 0.0);
        }
    }
}

#[test]
fn seminorm_ratios() {
    let constant = SeminormConfig {
        signal: SignalSpec::cosine(1, 0.0, 2.0),
        ..SeminormConfig::linear(1, vec![200], 3, 4)
    };
    let rep = run_seminorm_check(&constant).unwrap();
    assert!(rep.rows.iter().all(|r| r.ratio == 0.0));

    let lin = run_seminorm_check(&SeminormConfig::linear(1, vec![500, 1000, 2000], 5, 5)).unwrap();
    assert_eq!(lin.seminorm, 1.0);
    for s in &lin.summary {
        assert!(s.min > 0.0 && s.max / s.min <= 3.0, "{s:?}");
    }

    let pts = sample_design(&DesignSpec::uniform(2, Domain::Unit).with_seed(6), 400).unwrap();
    let g = build_graph(&pts, 0.1, &KernelSpec::uniform(2)).unwrap();
    let f: Vec<f64> = pts.iter().map(|x| x[0]).collect();
    let f2: Vec<f64> = f.iter().map(|v| 2.0 * v).collect();
    assert_eq!(
        g.quadratic_form(&f2).unwrap(),
        4.0 * g.quadratic_form(&f).unwrap()
    );
}

#[test]
fn spectral_rows_start_at_zero() {
    let cfg = SpectralEnvelopeConfig {
        n_list: vec![300],
        d_list: vec![1, 2],
        seed: 7,
        ..Default::default()
    };
    for row in run_spectral_envelope(&cfg).unwrap() {
        assert!(row.lambda_1.abs() < 1e-8);
        assert_eq!(row.eigenvalues.len(), 300);
        assert!(row.lambda_max <= 2.0 * row.max_degree + 1e-9);
        assert!(row.min_ratio > 0.0 && row.min_ratio <= row.max_ratio);
    }
    assert_eq!(
        spectral_envelope(100, 0.1, 1, 4),
        (100.0 * 0.1f64.powi(3) * 16.0).min(10.0)
    );
}

#[test]
fn certificate_holds_in_small_run() {
    let rep = run_certificate_check(&CertificateConfig::one_dimensional(200, 20, 8)).unwrap();
    assert_eq!(rep.rows.len(), 20);
    assert!(rep.holds_fraction >= 0.9);
}

#[test]
fn manifest_hashes_match_contents() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = OutputDir::create(dir.path().join("run")).unwrap();
    out.write_table(
        "t.csv",
        &["a", "b"],
        vec![vec!["1".to_string(), "2".to_string()]],
    )
    .unwrap();
    out.write_bytes("raw.txt", b"hello\n").unwrap();
    let manifest = out.finish("demo", &serde_json::json!({"seed": 1})).unwrap();
    assert_eq!(manifest.files.len(), 2);
    for f in &manifest.files {
        let bytes = std::fs::read(dir.path().join("run").join(&f.name)).unwrap();
        assert_eq!(git_blob_sha256(&bytes), f.sha256);
    }
    // matches `git hash-object` under sha256 for "hello\n"
    assert_eq!(
        git_blob_sha256(b"hello\n"),
        "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
    );
    assert!(dir.path().join("run/manifest.json").exists());
}
