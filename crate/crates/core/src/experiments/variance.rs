use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direct sums `sum_{k=2}^n (t k^{2/d} + 1)^{-p}` for `p = 2, 4` against
/// their closed-form envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSumRow {
    pub d: usize,
    pub t: f64,
    pub n: usize,
    pub sum2: f64,
    pub lower2: f64,
    pub upper2: f64,
    pub sum4: f64,
    /// Fourth-power envelope, stated for `d <= 4` only.
    pub lower4: Option<f64>,
    pub upper4: Option<f64>,
}

impl VarianceSumRow {
    pub fn holds(&self) -> bool {
        let fourth = match (self.lower4, self.upper4) {
            (Some(lo), Some(hi)) => lo <= self.sum4 && self.sum4 <= hi,
            _ => true,
        };
        self.lower2 <= self.sum2 && self.sum2 <= self.upper2 && fourth
    }

    /// Smallest relative slack to any bound; negative when one fails.
    pub fn margin(&self) -> f64 {
        let mut m =
            ((self.sum2 - self.lower2) / self.upper2).min((self.upper2 - self.sum2) / self.upper2);
        if let (Some(lo), Some(hi)) = (self.lower4, self.upper4) {
            m = m.min((self.sum4 - lo) / hi).min((hi - self.sum4) / hi);
        }
        m
    }
}

/// Ten values of `t` with `t^{-d/2}` log-spaced over `[1, n]`.
pub fn default_t_grid(d: usize, n: usize) -> Vec<f64> {
    let top = (n as f64).ln();
    (0..10)
        .map(|i| {
            let s = (top * i as f64 / 9.0).exp();
            s.powf(-2.0 / d as f64)
        })
        .collect()
}

/// Checks every pair `(d, t)`; an empty `t_grid` uses [`default_t_grid`].
pub fn run_variance_sum_check(
    d_list: &[usize],
    t_grid: &[f64],
    n: usize,
) -> Result<Vec<VarianceSumRow>> {
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    let mut rows = Vec::new();
    for &d in d_list {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let grid = if t_grid.is_empty() {
            default_t_grid(d, n)
        } else {
            t_grid.to_vec()
        };
        for &t in &grid {
            rows.push(variance_sum_row(d, t, n)?);
        }
    }
    Ok(rows)
}

pub fn variance_sum_row(d: usize, t: f64, n: usize) -> Result<VarianceSumRow> {
    let df = d as f64;
    let nf = n as f64;
    let s = t.powf(-df / 2.0);
    // allow rounding at the endpoints of the grid
    if !(t > 0.0 && s >= 1.0 - 1e-9 && s <= nf * (1.0 + 1e-9)) {
        return Err(Error::invalid(format!(
            "need 1 <= t^(-d/2) <= n, got {s} for t = {t}, d = {d}"
        )));
    }
    let (mut sum2, mut sum4) = (0.0, 0.0);
    for k in 2..=n {
        let v = 1.0 / (t * (k as f64).powf(2.0 / df) + 1.0);
        let v2 = v * v;
        sum2 += v2;
        sum4 += v2 * v2;
    }
    let extra = match d {
        1..=3 => 3.0 * s,
        4 => nf.ln() / (t * t),
        _ => nf.powf(1.0 - 4.0 / df) / (t * t),
    };
    let (lower4, upper4) = if d <= 4 {
        (Some(s / 32.0 - 1.0), Some(2.0 * s))
    } else {
        (None, None)
    };
    Ok(VarianceSumRow {
        d,
        t,
        n,
        sum2,
        lower2: s / 8.0 - 1.0,
        upper2: s + extra,
        sum4,
        lower4,
        upper4,
    })
}
