//! Direct sums of `(t k^{2/d} + 1)^{-p}` for `p = 2, 4` against their
//! closed-form envelopes.
//!
//! cargo run --release --example variance_sums -- [n]

use lapsmooth::experiments::run_variance_sum_check;

fn main() -> lapsmooth::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(1000, |s| s.parse().expect("n must be an integer"));
    println!(
        "{:>2} {:>10} {:>10} {:>10} {:>10} {:>9} {:>6}",
        "d", "t", "lower", "sum", "upper", "sum4", "holds"
    );
    for row in run_variance_sum_check(&[1, 2, 3, 4, 5], &[], n)? {
        println!(
            "{:>2} {:>10.3e} {:>10.2} {:>10.2} {:>10.2} {:>9.2} {:>6}",
            row.d,
            row.t,
            row.lower2,
            row.sum2,
            row.upper2,
            row.sum4,
            row.holds()
        );
    }
    Ok(())
}
