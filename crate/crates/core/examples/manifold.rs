//! Rates on a circle embedded in R^3 compared with the full cube `[-1,1]^3`,
//! plus a negative control that tunes the circle with the ambient dimension.
//!
//! cargo run --release --example manifold -- [reps]

use lapsmooth::experiments::{
    parse_n_grid, run_manifold_rate_experiment, run_rate_experiment, ExperimentConfig, RateCurve,
};

fn report(label: &str, curve: &RateCurve) {
    let slope = curve.fitted_slope.unwrap_or(f64::NAN);
    let se = curve.slope_std_err.unwrap_or(f64::NAN);
    println!(
        "{label:<28} slope {slope:>7.3} +/- {se:.3}  (reference {:.3})",
        curve.reference_slope
    );
    for row in &curve.rows {
        println!(
            "    n {:>6}  mse {:.4e}  rho {:.3e}",
            row.n, row.mean_error, row.rho
        );
    }
}

fn main() -> lapsmooth::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .map_or(5, |s| s.parse().expect("reps must be an integer"));
    let grid = parse_n_grid("1000:10000:log5")?;

    let circle = ExperimentConfig::manifold_circle(3, grid.clone(), reps, 7);
    report(
        "circle, tuned with m = 1",
        &run_manifold_rate_experiment(&circle)?,
    );

    let cube = ExperimentConfig::rates(3, grid.clone(), reps, 7);
    report("cube [-1,1]^3", &run_rate_experiment(&cube)?);

    let control = ExperimentConfig {
        dim_used: Some(3),
        c0: cube.c0,
        ..circle
    };
    report(
        "circle, tuned with d = 3",
        &run_manifold_rate_experiment(&control)?,
    );
    Ok(())
}
