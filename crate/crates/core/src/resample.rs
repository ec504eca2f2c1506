//! Length functions and the time warp used by resampled iterative filtering.
//!
//! A length function `ℓ(x)` gives the local half-width of the smoothing
//! window. Warping time by `G⁻¹(x) = ∫₀ˣ dt/ℓ(t)` turns a component whose
//! local frequency is `ξ/ℓ(x)` into one of constant frequency `ξ` on the
//! warped axis `[0, M)`, where `M = G⁻¹(1)`.

use crate::error::{Error, Result};
use crate::signal::{extrema_indices, Signal};
use crate::spline::{MonotoneCubic, PeriodicSpline};

/// Margin kept between `ℓ` and the open interval `(0, 1/2)`.
pub const LENGTH_EPS: f64 = 1e-6;

/// Sampled `ℓ(x_i)`, `x_i = i/n`, with `0 < ℓ < 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFunction {
    values: Vec<f64>,
}

impl LengthFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 8 {
            return Err(Error::arg("length function needs at least 8 samples"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0 && **v < 0.5))
        {
            return Err(Error::arg(format!(
                "length value {v} at index {i} outside (0, 1/2)"
            )));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Clamps arbitrary positive values into `(ε, 1/2 − ε)`; reports whether
    /// anything was moved.
    pub fn clamped(raw: Vec<f64>) -> Result<(Self, bool)> {
        let mut moved = false;
        let values = raw
            .into_iter()
            .map(|v| {
                let c = v.clamp(LENGTH_EPS, 0.5 - LENGTH_EPS);
                moved |= c != v;
                c
            })
            .collect();
        Ok((Self::new(values)?, moved))
    }
}

/// `ℓ = ξ / freq`, clamped. The flag reports clamping.
pub fn length_from_freq(freq: &[f64], xi: f64) -> Result<(LengthFunction, bool)> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::arg(format!("xi must be positive, got {xi}")));
    }
    if let Some(i) = freq.iter().position(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::arg(format!(
            "frequency at index {i} is not positive: {}",
            freq[i]
        )));
    }
    LengthFunction::clamped(freq.iter().map(|f| xi / f).collect())
}

/// Heuristic `ℓ` from the spacing of the signal's extrema.
///
/// Each gap between consecutive extrema is a local half period, placed at
/// the gap midpoint; `ℓ = ξ · gap / n` is linearly interpolated between
/// midpoints (periodically), smoothed once with a centred moving average as
/// wide as the median gap, and clamped.
pub fn default_length_from_extrema(s: &Signal, xi: f64) -> Result<(LengthFunction, bool)> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::arg(format!("xi must be positive, got {xi}")));
    }
    let n = s.len();
    let idx = extrema_indices(s);
    if idx.len() < 2 {
        return Err(Error::Trend(format!(
            "{} strict extrema, need at least 2",
            idx.len()
        )));
    }
    let p = idx.len();
    let nf = n as f64;
    let mut knots: Vec<(f64, f64)> = (0..p)
        .map(|j| {
            let gap = if j + 1 < p {
                idx[j + 1] - idx[j]
            } else {
                idx[0] + n - idx[p - 1]
            };
            let mid = (idx[j] as f64 + 0.5 * gap as f64).rem_euclid(nf);
            (mid, xi * gap as f64 / nf)
        })
        .collect();
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));

    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64;
            // First knot strictly after x, wrapping.
            let k = knots.partition_point(|&(m, _)| m <= x);
            let (m0, v0) = if k == 0 {
                let (m, v) = knots[p - 1];
                (m - nf, v)
            } else {
                knots[k - 1]
            };
            let (m1, v1) = if k == p {
                let (m, v) = knots[0];
                (m + nf, v)
            } else {
                knots[k]
            };
            if m1 == m0 {
                v0
            } else {
                v0 + (v1 - v0) * (x - m0) / (m1 - m0)
            }
        })
        .collect();

    let mut gaps: Vec<usize> = (0..p)
        .map(|j| if j + 1 < p { idx[j + 1] - idx[j] } else { idx[0] + n - idx[p - 1] })
        .collect();
    gaps.sort_unstable();
    let width = gaps[p / 2].clamp(1, n);
    let half = width / 2;
    let span = 2 * half + 1;
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            (0..span)
                .map(|k| raw[(i + n * span - half + k) % n])
                .sum::<f64>()
                / span as f64
        })
        .collect();
    LengthFunction::clamped(smoothed)
}

/// Tabulated warp between the original axis `[0, 1)` and the warped axis `[0, M)`.
#[derive(Debug, Clone)]
pub struct ResamplingMap {
    g_inv: Vec<f64>,
    m_total: f64,
    forward: MonotoneCubic,
}

impl ResamplingMap {
    /// `G⁻¹(i/n)` for `i = 0..=n`.
    pub fn g_inv_table(&self) -> &[f64] {
        &self.g_inv
    }

    /// Warped domain length `M = G⁻¹(1)`.
    pub fn m_total(&self) -> f64 {
        self.m_total
    }

    pub fn n(&self) -> usize {
        self.g_inv.len() - 1
    }

    /// `G(y)`, extended by `G(y + M) = G(y) + 1`.
    pub fn g(&self, y: f64) -> f64 {
        let k = (y / self.m_total).floor();
        self.forward.evaluate(y - k * self.m_total) + k
    }

    /// `G⁻¹(x)`, the exact inverse of [`g`](Self::g), extended by `G⁻¹(x + 1) = G⁻¹(x) + M`.
    pub fn g_inv(&self, x: f64) -> f64 {
        let k = x.floor();
        self.forward.invert(x - k) + k * self.m_total
    }
}

/// Integrates `1/ℓ` with the composite trapezoid rule on the periodic grid.
///
/// `G` itself is the monotone cubic Hermite interpolant of the swapped table,
/// using the exact slopes `G′(G⁻¹(x)) = ℓ(x)`.
pub fn compute_resampling(ell: &LengthFunction) -> Result<ResamplingMap> {
    let l = ell.values();
    let n = l.len();
    let h = 1.0 / n as f64;
    let mut g_inv = Vec::with_capacity(n + 1);
    g_inv.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        acc += 0.5 * h * (1.0 / l[i] + 1.0 / l[(i + 1) % n]);
        g_inv.push(acc);
    }
    let m_total = acc;
    if m_total <= 2.0 {
        return Err(Error::Trend(format!(
            "signal is already a trend at this scale (M = {m_total})"
        )));
    }
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let slopes: Vec<f64> = (0..=n).map(|i| l[i % n]).collect();
    let forward = MonotoneCubic::with_slopes(g_inv.clone(), xs, slopes);
    Ok(ResamplingMap {
        g_inv,
        m_total,
        forward,
    })
}

/// `h[i] = S(G(M·i/n))` with `S` the periodic cubic spline of `s`.
pub fn resample(s: &Signal, map: &ResamplingMap) -> Result<Signal> {
    let n = s.len();
    if n != map.n() {
        return Err(Error::arg(format!(
            "signal length {n} does not match map size {}",
            map.n()
        )));
    }
    let spline = PeriodicSpline::new(s, 1.0);
    let m = map.m_total();
    Signal::new(
        (0..n)
            .map(|i| spline.evaluate(map.g(m * i as f64 / n as f64)))
            .collect(),
    )
}

/// `I[i] = H(G⁻¹(i/n))` with `H` the periodic cubic spline of `h` over `[0, M)`.
pub fn inverse_resample(h: &Signal, map: &ResamplingMap) -> Result<Signal> {
    let n = h.len();
    if n != map.n() {
        return Err(Error::arg(format!(
            "signal length {n} does not match map size {}",
            map.n()
        )));
    }
    let spline = PeriodicSpline::new(h, map.m_total());
    Signal::new(map.g_inv[..n].iter().map(|&y| spline.evaluate(y)).collect())
}
