//! Interpolants used by the resampler.

use rustfft::num_complex::Complex64;

use crate::fast::{dft_real, idft_real};

/// Periodic cubic spline through uniformly spaced samples over `[0, period)`.
///
/// Second derivatives come from the cyclic system
/// `m[i−1] + 4·m[i] + m[i+1] = 6·(y[i+1] − 2·y[i] + y[i−1]) / h²`, which is
/// circulant and solved exactly with one FFT pair.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    y: Vec<f64>,
    m: Vec<f64>,
    h: f64,
    period: f64,
}

impl PeriodicSpline {
    pub fn new(y: &[f64], period: f64) -> Self {
        let n = y.len();
        let h = period / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| 6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]) / (h * h))
            .collect();
        let mut spec = dft_real(&rhs);
        for (k, c) in spec.iter_mut().enumerate() {
            let w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            *c /= Complex64::from(4.0 + 2.0 * w.cos());
        }
        Self {
            y: y.to_vec(),
            m: idft_real(spec),
            h,
            period,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = x.rem_euclid(self.period) / self.h;
        let i = (t.floor() as usize).min(n - 1);
        let w = t - i as f64;
        let j = (i + 1) % n;
        let v = 1.0 - w;
        v * self.y[i]
            + w * self.y[j]
            + self.h * self.h / 6.0 * ((v * v * v - v) * self.m[i] + (w * w * w - w) * self.m[j])
    }
}

/// Monotone piecewise-cubic Hermite interpolant over strictly increasing knots.
///
/// Caller-supplied slopes are limited with the Fritsch–Carlson condition
/// `α² + β² ≤ 9`, which guarantees monotonicity on every interval.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` strictly increasing, `y` nondecreasing, `slopes` nonnegative.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut slopes: Vec<f64>) -> Self {
        for k in 0..x.len() - 1 {
            let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
            if delta == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let a = slopes[k] / delta;
            let b = slopes[k + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[k] = tau * a * delta;
                slopes[k + 1] = tau * b * delta;
            }
        }
        Self { x, y, d: slopes }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    /// Evaluates inside the knot range (clamped at the ends).
    pub fn evaluate(&self, t: f64) -> f64 {
        let k = self.interval(t);
        let h = self.x[k + 1] - self.x[k];
        let s = ((t - self.x[k]) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[k]
            + (s3 - 2.0 * s2 + s) * h * self.d[k]
            + (-2.0 * s3 + 3.0 * s2) * self.y[k + 1]
            + (s3 - s2) * h * self.d[k + 1]
    }

    /// Solves `evaluate(t) = v` for `t`; `v` must lie within the value range.
    pub fn invert(&self, v: f64) -> f64 {
        let last = self.y.len() - 1;
        let k = match self.y.binary_search_by(|p| p.total_cmp(&v)) {
            Ok(i) => return self.x[i],
            Err(0) => return self.x[0],
            Err(i) if i > last => return self.x[last],
            Err(i) => i - 1,
        };
        let (mut lo, mut hi) = (self.x[k], self.x[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.evaluate(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
