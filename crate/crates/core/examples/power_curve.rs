//! Power of the spectral-threshold test against `eps * sqrt(2) cos(pi x)` on
//! `[0, 1]`, and the separation needed for 80% power as n grows.
//!
//! cargo run --release --example power_curve -- [reps]

use lapsmooth::experiments::{run_testing_rate, TestingRateConfig};

fn main() -> lapsmooth::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .map_or(50, |s| s.parse().expect("reps must be an integer"));
    let cfg = TestingRateConfig::one_dimensional(vec![250, 500, 1000, 2000], reps, 3);
    let report = run_testing_rate(&cfg)?;
    for curve in &report.curves {
        let at = |eps: f64| {
            curve
                .rows
                .iter()
                .min_by(|a, b| (a.epsilon - eps).abs().total_cmp(&(b.epsilon - eps).abs()))
                .map_or(f64::NAN, |r| r.rejection_rate)
        };
        println!(
            "n {:>5}  rho {:.3}  size {:.3}  power at eps 0.1/0.2/0.4: {:.2} {:.2} {:.2}",
            curve.n,
            curve.rho,
            curve.null_rejection_rate,
            at(0.1),
            at(0.2),
            at(0.4)
        );
    }
    for (n, eps) in &report.critical {
        println!(
            "n {n:>5}  eps at {:.0}% power: {eps:.4?}",
            100.0 * cfg.target_power
        );
    }
    if let (Some(s), Some(se)) = (report.fitted_slope, report.slope_std_err) {
        println!(
            "slope {s:.3} +/- {se:.3} (reference {:.3})",
            report.reference_slope
        );
    }
    Ok(())
}
