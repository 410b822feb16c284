//! Goodness-of-fit test of `f0 = 0` with the spectral threshold, under the
//! null and under a cosine alternative, plus a non-zero null handled by
//! centering the responses.
//!
//! cargo run --release --example gof_test

use lapsmooth::estimator::{resolve_tuning, Task, TuningOverrides};
use lapsmooth::kernel::KernelSpec;
use lapsmooth::synthetic::{make_dataset, DesignSpec, Domain, SignalSpec};
use lapsmooth::testing::{center_by_null, gof_test_spectral, GofTestResult};

fn show(label: &str, res: &GofTestResult) {
    println!(
        "{label:<24} T = {:.4}  threshold = {:.4}  reject = {}",
        res.statistic,
        res.threshold.unwrap_or(f64::NAN),
        res.reject
    );
}

fn main() -> lapsmooth::Result<()> {
    let n = 1000;
    let design = DesignSpec::uniform(1, Domain::Unit);
    let kernel = KernelSpec::uniform(1);
    let tuning = resolve_tuning(n, 1, 1.0, Task::Testing, &TuningOverrides::default())?;

    let null = make_dataset(&design, &SignalSpec::zero(1), n, 1)?;
    show(
        "pure noise",
        &gof_test_spectral(&null.points, &null.y, &tuning, &kernel, 0.05)?,
    );

    let alt = make_dataset(&design, &SignalSpec::cosine(1, 1.0, 0.4), n, 2)?;
    show(
        "cosine, amplitude 0.4",
        &gof_test_spectral(&alt.points, &alt.y, &tuning, &kernel, 0.05)?,
    );

    // test f0 = 0.4 cos(pi x) itself: subtract it and test the remainder
    let centered = center_by_null(&alt.y, &alt.f0_at_points)?;
    show(
        "null = the true signal",
        &gof_test_spectral(&alt.points, &centered, &tuning, &kernel, 0.05)?,
    );
    Ok(())
}
