//! Full Laplacian spectra of random geometric graphs against the envelope
//! `min(n r^{d+2} k^{2/d}, n r^d)`.
//!
//! cargo run --release --example spectral_envelope

use lapsmooth::experiments::{run_spectral_envelope, SpectralEnvelopeConfig};

fn main() -> lapsmooth::Result<()> {
    let cfg = SpectralEnvelopeConfig {
        seed: 11,
        ..Default::default()
    };
    println!(
        "{:>2} {:>5} {:>8} {:>9} {:>9} {:>7} {:>7}",
        "d", "n", "r", "min", "max", "spread", "slope"
    );
    for row in run_spectral_envelope(&cfg)? {
        println!(
            "{:>2} {:>5} {:>8.4} {:>9.4} {:>9.4} {:>7.2} {:>7.3}",
            row.d,
            row.n,
            row.r,
            row.min_ratio,
            row.max_ratio,
            row.ratio_spread(),
            row.slope
        );
    }
    Ok(())
}
