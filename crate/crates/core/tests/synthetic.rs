mod common;

use std::f64::consts::PI;

use common::*;
use lapsmooth::synthetic::*;
use lapsmooth::Error;

#[test]
fn symmetric_cube_mean_is_centered() {
    let n = 4000;
    let pts = sample_design(&DesignSpec::uniform(1, Domain::Symmetric).with_seed(1), n).unwrap();
    let mean = pts.iter().map(|x| x[0]).sum::<f64>() / n as f64;
    assert!(mean.abs() < 3.0 / (n as f64).sqrt());
    assert!(pts.iter().all(|x| (-1.0..=1.0).contains(&x[0])));
}

#[test]
fn circle_points_lie_on_the_circle() {
    let pts = sample_design(&DesignSpec::circle(3).with_seed(2), 1000).unwrap();
    assert_eq!(pts.dim(), 3);
    assert_eq!(pts.intrinsic_dim(), Some(1));
    for x in pts.iter() {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(x[2], 0.0);
    }
}

#[test]
fn ks_passes_at_one_percent_in_most_runs() {
    let n = 500;
    // asymptotic one-sided-free Kolmogorov critical value at alpha = 0.01
    let crit = 1.628 / (n as f64).sqrt();
    let passes = (0..100)
        .filter(|&seed| {
            let pts =
                sample_design(&DesignSpec::uniform(2, Domain::Unit).with_seed(seed), n).unwrap();
            let first: Vec<f64> = pts.iter().map(|x| x[0]).collect();
            ks_uniform(&first, 0.0, 1.0) < crit
        })
        .count();
    assert!(passes >= 95, "{passes}/100");
}

#[test]
fn swiss_roll_and_bump_designs() {
    let roll = sample_design(&DesignSpec::swiss_roll().with_seed(3), 500).unwrap();
    assert_eq!((roll.dim(), roll.intrinsic_dim()), (3, Some(2)));
    let spec = DesignSpec::lipschitz_bump(2, 0.5, 0.4).with_seed(4);
    let (p_min, p_max) = spec.density_bounds();
    assert!(p_min > 0.0 && p_max < f64::INFINITY && p_min < p_max);
    let pts = sample_design(&spec, 3000).unwrap();
    // the bump puts extra mass at the center
    let near = pts
        .iter()
        .filter(|x| (x[0] - 0.5).abs() < 0.2 && (x[1] - 0.5).abs() < 0.2)
        .count();
    assert!(near as f64 / 3000.0 > 0.16 + 0.02);
}

#[test]
fn low_acceptance_is_a_configuration_error() {
    let spec = DesignSpec::lipschitz_bump(3, 1e-4, 0.02);
    assert!(matches!(sample_design(&spec, 100), Err(Error::Config(_))));
}

#[test]
fn invalid_designs_rejected() {
    assert!(sample_design(&DesignSpec::circle(1), 10).is_err());
    assert!(sample_design(&DesignSpec::uniform(1, Domain::Unit), 1).is_err());
    assert!(sample_design(&DesignSpec::lipschitz_bump(1, 0.0, 0.5), 10).is_err());
}

#[test]
fn signal_examples() {
    let s = SignalSpec::cosine(3, 1.0, 2.5);
    assert_eq!(s.eval(&[0.0; 3]), 2.5);
    assert!(SignalSpec::cosine(1, 1.0, 1.0).eval(&[0.5]).abs() <= 1e-15);
    assert!(SignalSpec::cosine(2, 2.0, 4.0).eval(&[0.25, 0.5]).abs() <= 1e-15 * 4.0);
    assert_eq!(SignalSpec::linear(2, 1, 3.0).eval(&[0.1, 0.2]), 3.0 * 0.2);
    assert_eq!(SignalSpec::zero(2).eval(&[0.3, 0.4]), 0.0);
    assert_eq!(
        SignalSpec::custom(1, |x| x[0] * x[0])
            .with_amplitude(2.0)
            .eval(&[3.0]),
        18.0
    );
    let pts = sample_design(&DesignSpec::uniform(2, Domain::Unit), 5).unwrap();
    assert!(evaluate_signal(&SignalSpec::zero(3), &pts).is_err());
    assert!(evaluate_signal(&SignalSpec::linear(2, 2, 1.0), &pts).is_err());
}

#[test]
fn pure_noise_variance() {
    let ds = make_dataset(
        &DesignSpec::uniform(1, Domain::Unit),
        &SignalSpec::cosine(1, 1.0, 0.0),
        1000,
        5,
    )
    .unwrap();
    let mean = ds.y.iter().sum::<f64>() / 1000.0;
    let var = ds.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 999.0;
    assert!((0.8..=1.2).contains(&var), "{var}");
}

#[test]
fn noise_moments() {
    let ds = make_dataset(
        &DesignSpec::uniform(1, Domain::Unit),
        &SignalSpec::zero(1),
        20_000,
        6,
    )
    .unwrap();
    let n = ds.y.len() as f64;
    let mean = ds.y.iter().sum::<f64>() / n;
    let m2 = ds.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = ds.y.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = ds.y.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    // four standard errors: sqrt(6 / n) and sqrt(24 / n)
    assert!(skew.abs() < 4.0 * (6.0 / n).sqrt(), "{skew}");
    assert!((kurt - 3.0).abs() < 4.0 * (24.0 / n).sqrt(), "{kurt}");
}

#[test]
fn datasets_are_deterministic() {
    let design = DesignSpec::circle(3);
    let signal = SignalSpec::linear(3, 0, 1.0);
    let a = make_dataset(&design, &signal, 300, 9).unwrap();
    let b = make_dataset(&design, &signal, 300, 9).unwrap();
    assert_eq!(a, b);
    let c = make_dataset(&design, &signal, 300, 10).unwrap();
    assert_ne!(a.y, c.y);
    assert_eq!(a.f0_at_points, evaluate_signal(&signal, &a.points).unwrap());
    // noise does not depend on the signal: same seed, same residuals
    let d = make_dataset(&design, &SignalSpec::zero(3), 300, 9).unwrap();
    for i in 0..300 {
        assert!((a.y[i] - a.f0_at_points[i] - d.y[i]).abs() < 1e-12);
    }
}

#[test]
fn noiseless_replicates() {
    let ds = make_replicate(
        &DesignSpec::uniform(2, Domain::Unit),
        &SignalSpec::cosine(2, 2.0, 1.0),
        50,
        1,
        3,
        0.0,
    )
    .unwrap();
    assert_eq!(ds.y, ds.f0_at_points);
    assert!(make_replicate(
        &DesignSpec::uniform(1, Domain::Unit),
        &SignalSpec::zero(1),
        5,
        1,
        0,
        -1.0
    )
    .is_err());
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn seminorm_oracle_values() {
    let s = SignalSpec::cosine(1, 1.0, 1.0);
    let v = sobolev_seminorm_oracle(&s, Domain::Unit).unwrap();
    assert!((v - PI * PI / 2.0).abs() < 1e-12);
    let quad = simpson(|x| (PI * (PI * x).sin()).powi(2), 0.0, 1.0, 2000);
    assert!((v - quad).abs() < 1e-6 * v);

    // d = 2, a = 2 on [-1, 1]^2 against a tensor Simpson rule
    let s2 = SignalSpec::cosine(2, 2.0, 1.0);
    let v2 = sobolev_seminorm_oracle(&s2, Domain::Symmetric).unwrap();
    let w = 2.0 * PI;
    let inner = |g: &dyn Fn(f64) -> f64| simpson(g, -1.0, 1.0, 2000);
    let quad2 = 2.0 * inner(&|x| (w * (w * x).sin()).powi(2)) * inner(&|x| (w * x).cos().powi(2));
    assert!((v2 - quad2).abs() < 1e-6 * v2);

    assert_eq!(
        sobolev_seminorm_oracle(&SignalSpec::zero(1), Domain::Unit).unwrap(),
        0.0
    );
    let c = 3.5;
    let scaled = sobolev_seminorm_oracle(&s.clone().with_amplitude(c), Domain::Unit).unwrap();
    assert!((scaled - c * c * v).abs() < 1e-12 * scaled);
    assert!(matches!(
        sobolev_seminorm_oracle(&SignalSpec::custom(1, |x| x[0]), Domain::Unit),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn intrinsic_degree_scaling_on_the_circle() {
    use lapsmooth::graph::build_graph;
    use lapsmooth::kernel::KernelSpec;
    let pts = sample_design(&DesignSpec::circle(3).with_seed(12), 2000).unwrap();
    let k = KernelSpec::uniform(3);
    let radii = [0.02, 0.04, 0.08, 0.16];
    let logs: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let g = build_graph(&pts, r, &k).unwrap();
            let mean_degree = g.nnz() as f64 / 2000.0;
            (r.ln(), mean_degree.ln())
        })
        .collect();
    let slope = (logs[3].1 - logs[0].1) / (logs[3].0 - logs[0].0);
    assert!((slope - 1.0).abs() <= 0.2, "{slope}");
}

#[test]
fn spec_json_round_trip() {
    let d = DesignSpec::lipschitz_bump(2, 0.3, 0.5).with_seed(7);
    let back: DesignSpec = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
    let s = SignalSpec::cosine(2, 2.0, 0.5);
    let back: SignalSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}
