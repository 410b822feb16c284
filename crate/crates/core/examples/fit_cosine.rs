//! Fits noisy cosine data with the theorem tuning rule and with a small
//! oracle sweep over the penalty, and extends the fit off the sample.
//!
//! cargo run --release --example fit_cosine -- [n]

use lapsmooth::estimator::{
    extend_voronoi, in_sample_mse, resolve_tuning, rho_grid, SmoothingProblem, Task,
    TuningOverrides,
};
use lapsmooth::kernel::KernelSpec;
use lapsmooth::synthetic::{make_dataset, DesignSpec, Domain, SignalSpec};

fn main() -> lapsmooth::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(2000, |s| s.parse().expect("n must be an integer"));
    let design = DesignSpec::uniform(1, Domain::Symmetric);
    let signal = SignalSpec::cosine(1, 1.0, 1.0);
    let data = make_dataset(&design, &signal, n, 42)?;

    let tuning = resolve_tuning(n, 1, 1.0, Task::Estimation, &TuningOverrides::default())?;
    let problem = SmoothingProblem::new(data.points.clone(), tuning.r, &KernelSpec::uniform(1))?;
    let fit = problem.fit(&data.y, &tuning)?;
    println!(
        "theorem rule: rho {:.3e}, r {:.4}, CG iterations {}",
        tuning.rho, tuning.r, fit.solve.iterations
    );
    println!(
        "in-sample MSE {:.4e}",
        in_sample_mse(&fit, &data.f0_at_points)?
    );

    println!("oracle sweep:");
    for rho in rho_grid(tuning.rho, 9, 4.0) {
        let (f, _) = problem.smooth(&data.y, rho)?;
        let mse = f
            .iter()
            .zip(&data.f0_at_points)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n as f64;
        println!("    rho {rho:.3e}  mse {mse:.4e}");
    }

    let ext = extend_voronoi(&fit)?;
    let l2 = ext.l2_error_mc(|x| signal.eval(x), &design, 20_000, 7)?;
    println!("out-of-sample L2 error of the Voronoi extension {l2:.4e}");
    for x in [-0.75, 0.0, 0.5] {
        println!(
            "    f_hat({x:>5}) = {:>7.4}   f0 = {:>7.4}",
            ext.evaluate(&[x])?,
            signal.eval(&[x])
        );
    }
    Ok(())
}
