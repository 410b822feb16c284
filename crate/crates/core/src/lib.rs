//! Laplacian smoothing on kernel neighborhood graphs.
//!
//! Given a design `X_1..X_n` and responses `Y_i = f_0(X_i) + eps_i`, the
//! estimator is `f_hat = (I + rho L)^{-1} Y` where `L` is the Laplacian of the
//! graph with weights `W_ij = K(||X_i - X_j|| / r)`. The crate also provides a
//! goodness-of-fit test built on `||f_hat||^2 / n`, synthetic designs and
//! signals, and Monte Carlo experiments that measure convergence rates.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod points;
pub mod rng;
pub mod solver;
pub mod spatial;
pub mod synthetic;
pub mod testing;

pub use error::{Error, Result};
pub use estimator::{fit, SmoothingFit, SmoothingProblem, TuningOverrides, TuningSpec};
pub use graph::{build_graph, NeighborhoodGraph};
pub use kernel::{KernelFamily, KernelSpec};
pub use points::PointCloud;
