//! In-sample error versus n with oracle-tuned penalties on `[-1, 1]^d`.
//!
//! cargo run --release --example rate_curve -- [d] [reps]

use lapsmooth::experiments::{parse_n_grid, run_rate_experiment, ExperimentConfig};

fn main() -> lapsmooth::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args
        .next()
        .map_or(1, |s| s.parse().expect("d must be an integer"));
    let reps: usize = args
        .next()
        .map_or(5, |s| s.parse().expect("reps must be an integer"));
    let cfg = ExperimentConfig::rates(d, parse_n_grid("1000:10000:log5")?, reps, 7);
    let curve = run_rate_experiment(&cfg)?;
    println!(
        "{:>6} {:>11} {:>10} {:>10}",
        "n", "mean_mse", "stderr", "rho"
    );
    for row in &curve.rows {
        let edge = if row.at_grid_edge { " (grid edge)" } else { "" };
        println!(
            "{:>6} {:>11.4e} {:>10.2e} {:>10.3e}{edge}",
            row.n, row.mean_error, row.std_error, row.rho
        );
    }
    if let (Some(s), Some(se)) = (curve.fitted_slope, curve.slope_std_err) {
        println!(
            "slope {s:.3} +/- {se:.3} (minimax {:.3})",
            curve.reference_slope
        );
    }
    Ok(())
}
