//! Data-dependent bias and variance bounds compared with the realized
//! in-sample error across replicates.
//!
//! cargo run --release --example certificate -- [reps]

use lapsmooth::experiments::{run_certificate_check, CertificateConfig};

fn main() -> lapsmooth::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .map_or(50, |s| s.parse().expect("reps must be an integer"));
    let rep = run_certificate_check(&CertificateConfig::one_dimensional(500, reps, 14))?;
    println!("rho {:.3e}, r {:.4}", rep.rho, rep.r);
    for row in rep.rows.iter().take(10) {
        println!(
            "    rep {:>3}: mse {:.4e} <= {:.4e} + {:.4e}  {}",
            row.replicate, row.mse, row.bias_bound, row.variance_bound, row.holds
        );
    }
    println!(
        "bound holds in {:.1}% of {reps} replicates",
        100.0 * rep.holds_fraction
    );
    Ok(())
}
