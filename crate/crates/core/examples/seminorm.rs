//! Graph Sobolev seminorm `f'Lf` rescaled by `n^2 r^{d+2}` against the
//! continuum seminorm, for `f(x) = x_1` on the unit cube.
//!
//! cargo run --release --example seminorm -- [d]

use lapsmooth::experiments::{run_seminorm_check, SeminormConfig};

fn main() -> lapsmooth::Result<()> {
    let d: usize = std::env::args()
        .nth(1)
        .map_or(2, |s| s.parse().expect("d must be an integer"));
    let rep = run_seminorm_check(&SeminormConfig::linear(
        d,
        vec![500, 1000, 2000, 4000],
        10,
        3,
    ))?;
    println!("continuum seminorm {:.4}", rep.seminorm);
    for s in &rep.summary {
        println!(
            "    n {:>5}: ratio mean {:.4}  sd {:.4}  range [{:.4}, {:.4}]",
            s.n,
            s.mean,
            s.variance.sqrt(),
            s.min,
            s.max
        );
    }
    Ok(())
}
