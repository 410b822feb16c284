//! Linear solves and spectra for the smoothing operator `I + rho L`.

mod cg;
mod lanczos;
mod spectrum;

pub use cg::{solve_smoothing_system, SolveOptions, SolveReport};
pub use lanczos::{partial_spectrum, partial_spectrum_with, LanczosOptions, MAX_PARTIAL_K};
pub use spectrum::{
    full_eigendecomposition, full_spectrum, full_spectrum_with_cap, SpectrumMode, SpectrumResult,
    Which, DEFAULT_DENSE_CAP,
};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
