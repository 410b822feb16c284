//! Radial kernels satisfying the neighborhood-graph kernel condition.
//!
//! A kernel is a nonincreasing profile `K: [0, 1] -> (0, inf)` that vanishes
//! beyond 1, scaled so that `K(|z|)` integrates to one over `R^d`. Every
//! family here keeps `K(1) > 0`; the boundary point `t = 1` is inside the
//! support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUADRATURE_POINTS: usize = 64;

/// Shape of the kernel profile before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family", content = "table")]
pub enum KernelFamily {
    /// `K(t) = c` on `[0, 1]`.
    Uniform,
    /// `K(t) = c exp(-t^2 / 2)` on `[0, 1]`.
    TruncatedGaussian,
    /// `K(t) = c (1 - t^2 / 2)` on `[0, 1]`; keeps `K(1) = c / 2 > 0`.
    EpanechnikovLike,
    /// Piecewise-linear profile through equispaced nodes `t_j = j / (m - 1)`.
    CustomTable(Vec<f64>),
}

impl KernelFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Self::Uniform),
            "truncated-gaussian" | "gaussian" => Ok(Self::TruncatedGaussian),
            "epanechnikov-like" | "epanechnikov" => Ok(Self::EpanechnikovLike),
            other => Err(Error::invalid(format!(
                "unknown kernel family `{other}` (expected uniform, truncated-gaussian or epanechnikov-like)"
            ))),
        }
    }

    fn profile(&self, t: f64) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::TruncatedGaussian => (-0.5 * t * t).exp(),
            Self::EpanechnikovLike => 1.0 - 0.5 * t * t,
            Self::CustomTable(nodes) => {
                let segments = (nodes.len() - 1) as f64;
                let pos = (t * segments).clamp(0.0, segments);
                let j = (pos.floor() as usize).min(nodes.len() - 2);
                let frac = pos - j as f64;
                nodes[j] + frac * (nodes[j + 1] - nodes[j])
            }
        }
    }

    /// Breakpoints of the profile on `[0, 1]`; quadrature runs per segment so
    /// piecewise-linear tables integrate exactly.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::CustomTable(nodes) => {
                let m = nodes.len() - 1;
                (0..=m).map(|j| j as f64 / m as f64).collect()
            }
            _ => vec![0.0, 1.0],
        }
    }

    fn validate(&self) -> Result<()> {
        if let Self::CustomTable(nodes) = self {
            if nodes.len() < 2 {
                return Err(Error::invalid("kernel table needs at least two nodes"));
            }
            if nodes.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("kernel table has non-finite entries"));
            }
            if nodes.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::invalid("kernel table must be nonincreasing"));
            }
            if *nodes.last().unwrap() <= 0.0 {
                return Err(Error::invalid("kernel table must be positive at t = 1"));
            }
        }
        Ok(())
    }
}

/// A normalized radial kernel for a fixed ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    dim: usize,
    normalization: f64,
    sigma_k: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("kernel dimension must be positive"));
        }
        family.validate()?;
        let sphere = unit_sphere_area(dim);
        let normalization = match family {
            KernelFamily::Uniform => 1.0 / unit_ball_volume(dim),
            _ => 1.0 / (sphere * radial_integral(&family, dim - 1)),
        };
        let sigma_k = normalization * sphere * radial_integral(&family, dim + 1) / dim as f64;
        Ok(Self {
            family,
            dim,
            normalization,
            sigma_k,
        })
    }

    pub fn uniform(dim: usize) -> Self {
        Self::new(KernelFamily::Uniform, dim).expect("uniform kernel is always valid")
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Second-moment constant `(1/d) * int |x|^2 K(|x|) dx`.
    pub fn sigma_k(&self) -> f64 {
        self.sigma_k
    }

    /// `K(t)`: zero for `t > 1`.
    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        self.normalization * self.family.profile(t)
    }

    /// Edge weight `K(dist / r)` from a squared distance. Pairs with
    /// `dist^2 <= r^2` are inside the support.
    #[inline]
    pub fn weight_from_sq_dist(&self, dist_sq: f64, radius: f64) -> f64 {
        if dist_sq > radius * radius {
            return 0.0;
        }
        let t = (dist_sq.sqrt() / radius).min(1.0);
        self.normalization * self.family.profile(t)
    }

    /// `int_{R^d} K(|z|) dz` recomputed by polar quadrature; one up to
    /// rounding for any constructed kernel.
    pub fn total_mass(&self) -> f64 {
        self.normalization
            * unit_sphere_area(self.dim)
            * radial_integral(&self.family, self.dim - 1)
    }
}

/// `int_0^1 profile(t) t^power dt`, composite Gauss-Legendre over the profile
/// breakpoints.
fn radial_integral(family: &KernelFamily, power: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(QUADRATURE_POINTS);
    family
        .breakpoints()
        .windows(2)
        .map(|seg| {
            let (a, b) = (seg[0], seg[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| {
                    let t = mid + half * x;
                    w * family.profile(t) * t.powi(power as i32)
                })
                .sum::<f64>()
                * half
        })
        .sum()
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`, i.e. `d * V_d`.
pub(crate) fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

pub(crate) fn unit_ball_volume(dim: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2 pi / d
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if dim.is_multiple_of(2) { 2 } else { 3 };
    while k <= dim {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
