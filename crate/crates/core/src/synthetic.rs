//! Designs, regression functions and noisy responses `Y_i = f_0(X_i) + eps_i`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::PointCloud;
use crate::rng::{stream, Purpose};

/// Axis-aligned cube `[lo, hi]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `[0, 1]^d`
    #[default]
    Unit,
    /// `[-1, 1]^d`
    Symmetric,
}

impl Domain {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Domain::Unit => (0.0, 1.0),
            Domain::Symmetric => (-1.0, 1.0),
        }
    }

    pub fn volume(self, d: usize) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).powi(d as i32)
    }

    fn map(self, u: f64) -> f64 {
        let (lo, hi) = self.bounds();
        lo + (hi - lo) * u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DesignFamily {
    UniformCube {
        domain: Domain,
    },
    /// Density on `[0,1]^d` proportional to `floor + max(0, 1 - |x - c| / width)`
    /// with `c` the cube center, drawn by rejection from the uniform.
    LipschitzBump {
        floor: f64,
        width: f64,
    },
    /// `(cos t, sin t, 0, ..., 0)` with `t` uniform on `[0, 2 pi)`.
    CircleInRd,
    /// `(t cos t, h, t sin t) / (4.5 pi)` with `t` uniform on `[1.5 pi, 4.5 pi]`,
    /// `h` uniform on `[0, 10]`. Note: the roll has a boundary.
    SwissRoll,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub family: DesignFamily,
    /// Ambient dimension.
    pub d: usize,
    /// Intrinsic dimension; equals `d` for full-dimensional designs.
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
}

impl DesignSpec {
    pub fn uniform(d: usize, domain: Domain) -> Self {
        Self {
            family: DesignFamily::UniformCube { domain },
            d,
            m: d,
            seed: 0,
        }
    }

    pub fn circle(d: usize) -> Self {
        Self {
            family: DesignFamily::CircleInRd,
            d,
            m: 1,
            seed: 0,
        }
    }

    pub fn swiss_roll() -> Self {
        Self {
            family: DesignFamily::SwissRoll,
            d: 3,
            m: 2,
            seed: 0,
        }
    }

    pub fn lipschitz_bump(d: usize, floor: f64, width: f64) -> Self {
        Self {
            family: DesignFamily::LipschitzBump { floor, width },
            d,
            m: d,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_manifold(&self) -> bool {
        matches!(
            self.family,
            DesignFamily::CircleInRd | DesignFamily::SwissRoll
        )
    }

    /// The cube for full-dimensional families.
    pub fn domain(&self) -> Option<Domain> {
        match self.family {
            DesignFamily::UniformCube { domain } => Some(domain),
            DesignFamily::LipschitzBump { .. } => Some(Domain::Unit),
            _ => None,
        }
    }

    /// Density bounds `(p_min, p_max)` with respect to Lebesgue measure on
    /// the cube, or the volume form on the manifold.
    pub fn density_bounds(&self) -> (f64, f64) {
        match self.family {
            DesignFamily::UniformCube { domain } => {
                let p = 1.0 / domain.volume(self.d);
                (p, p)
            }
            DesignFamily::LipschitzBump { floor, width } => {
                let mass = bump_mass(self.d, floor, width);
                (floor / mass, (1.0 + floor) / mass)
            }
            DesignFamily::CircleInRd => {
                let p = 1.0 / (2.0 * PI);
                (p, p)
            }
            DesignFamily::SwissRoll => {
                // area element s^2 sqrt(1 + t^2) dt dh against a uniform (t, h) draw
                let s = 1.0 / (4.5 * PI);
                let (t0, t1) = (1.5 * PI, 4.5 * PI);
                let p_th = 1.0 / ((t1 - t0) * 10.0);
                let p = |t: f64| p_th / (s * s * (1.0 + t * t).sqrt());
                (p(t1), p(t0))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 || self.m > self.d {
            return Err(Error::Config(format!(
                "need 1 <= m <= d, got m = {}, d = {}",
                self.m, self.d
            )));
        }
        match self.family {
            DesignFamily::UniformCube { .. } if self.m != self.d => Err(Error::Config(
                "cube designs are full-dimensional (m = d)".into(),
            )),
            DesignFamily::LipschitzBump { floor, width } => {
                if self.m != self.d {
                    return Err(Error::Config(
                        "density designs are full-dimensional (m = d)".into(),
                    ));
                }
                if !(floor > 0.0 && floor.is_finite()) {
                    return Err(Error::Config(format!(
                        "density floor must be positive, got {floor}"
                    )));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::Config(format!(
                        "bump width must be positive, got {width}"
                    )));
                }
                Ok(())
            }
            DesignFamily::CircleInRd if self.d < 2 || self.m != 1 => {
                Err(Error::Config("circle needs d >= 2 and m = 1".into()))
            }
            DesignFamily::SwissRoll if self.d != 3 || self.m != 2 => {
                Err(Error::Config("swiss roll lives in d = 3 with m = 2".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Mass of the unnormalized bump density over `[0,1]^d`, by a fixed
/// quasi-random average.
fn bump_mass(d: usize, floor: f64, width: f64) -> f64 {
    let samples = 20_000;
    let mut rng = stream(0, Purpose::MonteCarlo, 0xb0b);
    let total: f64 = (0..samples)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            bump(&x, floor, width)
        })
        .sum();
    total / samples as f64
}

fn bump(x: &[f64], floor: f64, width: f64) -> f64 {
    let dist = x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>().sqrt();
    floor + (1.0 - dist / width).max(0.0)
}

/// Acceptance bookkeeping from a rejection sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionStats {
    pub proposals: usize,
    pub accepted: usize,
}

impl RejectionStats {
    pub fn rate(&self) -> f64 {
        self.accepted as f64 / self.proposals.max(1) as f64
    }
}

const MIN_ACCEPTANCE: f64 = 0.01;

/// `n` iid design points drawn with the spec's own seed.
pub fn sample_design(spec: &DesignSpec, n: usize) -> Result<PointCloud> {
    let mut rng = stream(spec.seed, Purpose::Design, 0);
    sample_design_from(spec, n, &mut rng).map(|(pc, _)| pc)
}

/// Draws from a caller-supplied stream; also returns rejection statistics
/// (all proposals accepted for direct samplers).
pub fn sample_design_from(
    spec: &DesignSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(PointCloud, RejectionStats)> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::invalid("need n >= 2 design points"));
    }
    let d = spec.d;
    let mut coords = Vec::with_capacity(n * d);
    let mut stats = RejectionStats {
        proposals: n,
        accepted: n,
    };
    match spec.family {
        DesignFamily::UniformCube { domain } => {
            coords.extend((0..n * d).map(|_| domain.map(rng.random::<f64>())));
        }
        DesignFamily::LipschitzBump { floor, width } => {
            let ceiling = 1.0 + floor;
            stats = RejectionStats {
                proposals: 0,
                accepted: 0,
            };
            let mut x = vec![0.0; d];
            while stats.accepted < n {
                x.iter_mut().for_each(|v| *v = rng.random::<f64>());
                stats.proposals += 1;
                if rng.random::<f64>() * ceiling <= bump(&x, floor, width) {
                    coords.extend_from_slice(&x);
                    stats.accepted += 1;
                }
                if stats.proposals >= 1000 && stats.rate() < MIN_ACCEPTANCE {
                    return Err(Error::Config(format!(
                        "rejection sampler acceptance {:.4} is below {MIN_ACCEPTANCE}",
                        stats.rate()
                    )));
                }
            }
        }
        DesignFamily::CircleInRd => {
            for _ in 0..n {
                let t = 2.0 * PI * rng.random::<f64>();
                coords.push(t.cos());
                coords.push(t.sin());
                coords.extend(std::iter::repeat_n(0.0, d - 2));
            }
        }
        DesignFamily::SwissRoll => {
            let s = 1.0 / (4.5 * PI);
            for _ in 0..n {
                let t = 1.5 * PI * (1.0 + 2.0 * rng.random::<f64>());
                let h = 10.0 * rng.random::<f64>();
                coords.extend_from_slice(&[s * t * t.cos(), s * h, s * t * t.sin()]);
            }
        }
    }
    let pc = PointCloud::new(coords, d)?;
    let pc = if spec.m < d {
        pc.with_intrinsic_dim(spec.m)?
    } else {
        pc
    };
    Ok((pc, stats))
}

pub type SignalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied regression function.
#[derive(Clone)]
pub struct CustomSignal(pub Arc<SignalFn>);

impl fmt::Debug for CustomSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomSignal(..)")
    }
}

impl PartialEq for CustomSignal {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SignalFamily {
    /// `prod_i cos(a pi x_i)`
    CosineProduct {
        frequency: f64,
    },
    /// `x_k`
    SingleCoordinateLinear {
        coordinate: usize,
    },
    Zero,
    #[serde(skip)]
    Custom(CustomSignal),
}

/// Regression function `f_0 = amplitude * family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub family: SignalFamily,
    pub amplitude: f64,
    pub d: usize,
}

impl SignalSpec {
    pub fn cosine(d: usize, frequency: f64, amplitude: f64) -> Self {
        Self {
            family: SignalFamily::CosineProduct { frequency },
            amplitude,
            d,
        }
    }

    /// The frequency used for the dimension sweep: `a = 2` for `d = 2`,
    /// `a = 1` otherwise.
    pub fn sweep_cosine(d: usize, amplitude: f64) -> Self {
        Self::cosine(d, if d == 2 { 2.0 } else { 1.0 }, amplitude)
    }

    pub fn linear(d: usize, coordinate: usize, amplitude: f64) -> Self {
        Self {
            family: SignalFamily::SingleCoordinateLinear { coordinate },
            amplitude,
            d,
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            family: SignalFamily::Zero,
            amplitude: 0.0,
            d,
        }
    }

    pub fn custom(d: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            family: SignalFamily::Custom(CustomSignal(Arc::new(f))),
            amplitude: 1.0,
            d,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            SignalFamily::CosineProduct { frequency } => {
                self.amplitude
                    * x.iter()
                        .map(|xi| (frequency * PI * xi).cos())
                        .product::<f64>()
            }
            SignalFamily::SingleCoordinateLinear { coordinate } => self.amplitude * x[*coordinate],
            SignalFamily::Zero => 0.0,
            SignalFamily::Custom(f) => self.amplitude * (f.0)(x),
        }
    }

    /// `||f_0||^2_{L^2(U)}` for `U` uniform on the cube, when closed-form.
    pub fn mean_square_uniform(&self, domain: Domain) -> Result<f64> {
        let (lo, hi) = domain.bounds();
        let len = hi - lo;
        match &self.family {
            SignalFamily::CosineProduct { frequency } => {
                let (_, cos2) = trig_square_integrals(*frequency, lo, hi);
                Ok(self.amplitude.powi(2) * (cos2 / len).powi(self.d as i32))
            }
            SignalFamily::SingleCoordinateLinear { .. } => {
                Ok(self.amplitude.powi(2) * (hi.powi(3) - lo.powi(3)) / (3.0 * len))
            }
            SignalFamily::Zero => Ok(0.0),
            SignalFamily::Custom(_) => Err(Error::Unsupported(
                "closed-form norm of a custom signal".into(),
            )),
        }
    }
}

/// `(int sin^2(a pi x), int cos^2(a pi x))` over `[lo, hi]`.
fn trig_square_integrals(a: f64, lo: f64, hi: f64) -> (f64, f64) {
    if a == 0.0 {
        return (0.0, hi - lo);
    }
    let w = 2.0 * a * PI;
    let osc = ((w * hi).sin() - (w * lo).sin()) / (2.0 * w);
    let half = 0.5 * (hi - lo);
    (half - osc, half + osc)
}

pub fn evaluate_signal(spec: &SignalSpec, points: &PointCloud) -> Result<Vec<f64>> {
    if spec.d != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: points.dim(),
        });
    }
    if let SignalFamily::SingleCoordinateLinear { coordinate } = spec.family {
        if coordinate >= spec.d {
            return Err(Error::invalid(format!(
                "coordinate {coordinate} out of range for d = {}",
                spec.d
            )));
        }
    }
    Ok(points.iter().map(|x| spec.eval(x)).collect())
}

/// `|f_0|^2_{H^1} = int_X |grad f_0|^2 dx` over a cube domain.
pub fn sobolev_seminorm_oracle(spec: &SignalSpec, domain: Domain) -> Result<f64> {
    let (lo, hi) = domain.bounds();
    let d = spec.d as i32;
    match &spec.family {
        SignalFamily::CosineProduct { frequency } => {
            let a = *frequency;
            let (sin2, cos2) = trig_square_integrals(a, lo, hi);
            Ok(spec.amplitude.powi(2) * (a * PI).powi(2) * spec.d as f64 * sin2 * cos2.powi(d - 1))
        }
        SignalFamily::SingleCoordinateLinear { .. } => {
            Ok(spec.amplitude.powi(2) * domain.volume(spec.d))
        }
        SignalFamily::Zero => Ok(0.0),
        SignalFamily::Custom(_) => Err(Error::Unsupported(
            "Sobolev seminorm of a custom signal without a gradient".into(),
        )),
    }
}

/// A simulated regression sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: PointCloud,
    pub y: Vec<f64>,
    pub f0_at_points: Vec<f64>,
    pub noise_sd: f64,
}

/// Dataset with unit-variance Gaussian noise, replicate 0 of `seed`.
pub fn make_dataset(
    design: &DesignSpec,
    signal: &SignalSpec,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    make_replicate(design, signal, n, seed, 0, 1.0)
}

/// Replicate `index` under `seed`. Design and noise come from separate
/// keyed streams; `noise_sd = 0` gives noiseless responses.
pub fn make_replicate(
    design: &DesignSpec,
    signal: &SignalSpec,
    n: usize,
    seed: u64,
    index: u64,
    noise_sd: f64,
) -> Result<Dataset> {
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::invalid(format!(
            "noise sd must be nonnegative, got {noise_sd}"
        )));
    }
    let (points, _) = sample_design_from(design, n, &mut stream(seed, Purpose::Design, index))?;
    let f0_at_points = evaluate_signal(signal, &points)?;
    let mut noise = stream(seed, Purpose::Noise, index);
    let y = f0_at_points
        .iter()
        .map(|f| {
            let e: f64 = StandardNormal.sample(&mut noise);
            f + noise_sd * e
        })
        .collect();
    Ok(Dataset {
        points,
        y,
        f0_at_points,
        noise_sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_signal_values() {
        let s = SignalSpec::cosine(1, 1.0, 3.0);
        assert!((s.eval(&[0.0]) - 3.0).abs() < 1e-15);
        assert!(s.eval(&[0.5]).abs() < 1e-15 * 3.0 + 1e-15);
        let s = SignalSpec::cosine(2, 2.0, 1.5);
        assert!(s.eval(&[0.25, 0.5]).abs() < 1e-15);
        assert_eq!(SignalSpec::cosine(3, 1.0, 2.0).eval(&[0.0; 3]), 2.0);
    }

    #[test]
    fn seminorm_closed_forms() {
        let s = SignalSpec::cosine(1, 1.0, 1.0);
        let v = sobolev_seminorm_oracle(&s, Domain::Unit).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-12);
        let s3 = s.clone().with_amplitude(3.0);
        assert!((sobolev_seminorm_oracle(&s3, Domain::Unit).unwrap() - 9.0 * v).abs() < 1e-10);
        assert_eq!(
            sobolev_seminorm_oracle(&SignalSpec::zero(2), Domain::Unit).unwrap(),
            0.0
        );
        let c = SignalSpec::custom(1, |x| x[0]);
        assert!(matches!(
            sobolev_seminorm_oracle(&c, Domain::Unit),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mean_square_of_cosine() {
        let s = SignalSpec::cosine(2, 1.0, 2.0);
        assert!((s.mean_square_uniform(Domain::Unit).unwrap() - 1.0).abs() < 1e-12);
        let l = SignalSpec::linear(1, 0, 1.0);
        assert!((l.mean_square_uniform(Domain::Unit).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn circle_points_on_unit_sphere() {
        let pc = sample_design(&DesignSpec::circle(3).with_seed(4), 500).unwrap();
        assert_eq!(pc.intrinsic_dim(), Some(1));
        for x in pc.iter() {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-12);
            assert_eq!(x[2], 0.0);
        }
    }

    #[test]
    fn rejection_sampler_guard() {
        let ok = DesignSpec::lipschitz_bump(2, 0.5, 0.5).with_seed(1);
        let pc = sample_design(&ok, 300).unwrap();
        assert!(pc.coords().iter().all(|v| (0.0..=1.0).contains(v)));
        let (pmin, pmax) = ok.density_bounds();
        assert!(pmin > 0.0 && pmax > pmin);
        // tiny floor, narrow bump in d = 6: acceptance far below 1%
        let bad = DesignSpec::lipschitz_bump(6, 1e-4, 0.05);
        assert!(matches!(sample_design(&bad, 100), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(DesignSpec::circle(1).validate().is_err());
        let mut s = DesignSpec::uniform(2, Domain::Unit);
        s.m = 1;
        assert!(s.validate().is_err());
        assert!(sample_design(&DesignSpec::uniform(2, Domain::Unit), 1).is_err());
        let pc = sample_design(&DesignSpec::uniform(2, Domain::Unit), 5).unwrap();
        assert!(evaluate_signal(&SignalSpec::zero(3), &pc).is_err());
        assert!(evaluate_signal(&SignalSpec::linear(2, 2, 1.0), &pc).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let d = DesignSpec::lipschitz_bump(2, 0.3, 0.4).with_seed(11);
        let back: DesignSpec = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        let s = SignalSpec::cosine(3, 1.0, 0.7);
        let back: SignalSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
