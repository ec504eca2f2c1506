//! Sampled periodic signals, extrema counting, stopping and error metrics.

use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest admissible signal length.
pub const MIN_SAMPLES: usize = 8;

/// Uniform samples `values[i] = g(i / n)` of a 1-periodic real function.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_SAMPLES {
            return Err(Error::arg(format!(
                "signal needs at least {MIN_SAMPLES} samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::arg(format!("sample {i} is not finite")));
        }
        Ok(Self { values })
    }

    /// Samples `f` at `x_i = i / n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|i| f(i as f64 / n as f64)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Sample positions `i / n`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.len()).map(|i| i as f64 / n).collect()
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl AsRef<[f64]> for Signal {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Inner-loop termination rule: relative update norm `<= delta`, or `max_iter` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoppingConfig {
    pub delta: f64,
    pub max_iter: usize,
}

impl StoppingConfig {
    pub fn new(delta: f64, max_iter: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::arg(format!("delta must be positive, got {delta}")));
        }
        if max_iter == 0 {
            return Err(Error::arg("max_iter must be at least 1"));
        }
        Ok(Self { delta, max_iter })
    }
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            max_iter: 500,
        }
    }
}

/// Indices of strict local extrema of the periodic extension.
///
/// Runs of equal samples are collapsed first; a run is an extremum when it is
/// strictly above (or below) both neighbouring runs. The reported index is
/// the centre of the run.
pub fn extrema_indices(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    // Start scanning at a run boundary so no run wraps around the seam.
    let start = match (0..n).find(|&i| values[i] != values[(i + n - 1) % n]) {
        Some(i) => i,
        None => return Vec::new(),
    };
    // (first index, length, value) per maximal run, in periodic order.
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        match runs.last_mut() {
            Some(run) if run.2 == values[i] => run.1 += 1,
            _ => runs.push((i, 1, values[i])),
        }
    }
    let r = runs.len();
    let mut out = Vec::new();
    for (j, &(first, len, v)) in runs.iter().enumerate() {
        let prev = runs[(j + r - 1) % r].2;
        let next = runs[(j + 1) % r].2;
        if (v > prev && v > next) || (v < prev && v < next) {
            out.push((first + (len - 1) / 2) % n);
        }
    }
    out.sort_unstable();
    out
}

/// Number of strict local extrema of the periodic extension.
pub fn count_extrema(values: &[f64]) -> usize {
    extrema_indices(values).len()
}

/// Result of [`stopping_value`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingValue {
    pub value: f64,
    /// The reference iterate was identically zero; treated as converged.
    pub zero_reference: bool,
}

/// `‖next − cur‖₂ / ‖cur‖₂`.
pub fn stopping_value(next: &[f64], cur: &[f64]) -> Result<StoppingValue> {
    if next.len() != cur.len() {
        return Err(Error::arg(format!(
            "length mismatch: {} vs {}",
            next.len(),
            cur.len()
        )));
    }
    let den = norm2(cur);
    if den == 0.0 {
        return Ok(StoppingValue {
            value: 0.0,
            zero_reference: true,
        });
    }
    let num = diff_norm2(next, cur);
    Ok(StoppingValue {
        value: num / den,
        zero_reference: false,
    })
}

/// `‖estimate − truth‖₂ / ‖truth‖₂`.
pub fn relative_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::arg(format!(
            "length mismatch: {} vs {}",
            estimate.len(),
            truth.len()
        )));
    }
    let den = norm2(truth);
    if den == 0.0 {
        return Err(Error::arg("relative error against a zero reference"));
    }
    Ok(diff_norm2(estimate, truth) / den)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn diff_norm2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Condition attached to an IMF or to a whole decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// An inner iterate was identically zero.
    ZeroIterate,
    /// The inner loop stopped on `max_iter` rather than on `delta`.
    MaxIterReached,
    /// The iterate norm grew past the divergence guard.
    Diverged,
    /// The length function was clamped into `(0, 1/2)`.
    LengthClamped,
    /// The residual's only extrema sit on the periodic seam.
    SeamExtrema,
    /// The length function came from the extrema heuristic.
    HeuristicLength,
    /// Extraction stopped because the IMF-count cap was hit.
    ImfCapReached,
    /// Extraction stopped because the length source had no further rounds.
    LengthSourceExhausted,
    /// A later round could not be configured; the residual became the trend.
    StoppedOnConfig,
}

/// Per-IMF record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImfDiagnostics {
    pub iterations: usize,
    pub final_stopping_value: f64,
    pub stopping_history: Vec<f64>,
    /// Normalization or scaling constant used by the engine for this round.
    pub scale_used: f64,
    /// Warped domain length `M` (FRIF) or `1/L` (IF); `None` for dense engines.
    pub warped_length: Option<f64>,
    pub warnings: Vec<Warning>,
}

/// IMFs in extraction order plus the trend residual.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub imfs: Vec<Signal>,
    pub residual: Signal,
    pub diagnostics: Vec<ImfDiagnostics>,
    pub warnings: Vec<Warning>,
    /// Reason the last round did not produce an IMF, when it was a configuration issue.
    pub stop_reason: Option<String>,
}

impl DecompositionResult {
    /// Elementwise `Σ imfs + residual`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.values().to_vec();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf.iter()) {
                *o += v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // Brute-force oracle: strict comparison with both neighbours, no plateau logic.
    fn naive_extrema(v: &[f64]) -> usize {
        let n = v.len();
        (0..n)
            .filter(|&i| {
                let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                (b > a && b > c) || (b < a && b < c)
            })
            .count()
    }

    #[test]
    fn constant_has_no_extrema() {
        assert_eq!(count_extrema(&[3.0; 50]), 0);
    }

    #[test]
    fn one_period_sine() {
        let s = Signal::from_fn(128, |x| (2.0 * PI * x).sin()).unwrap();
        assert_eq!(count_extrema(&s), 2);
    }

    #[test]
    fn five_period_sine_matches_scan() {
        let s = Signal::from_fn(1000, |x| (10.0 * PI * x).sin()).unwrap();
        assert_eq!(naive_extrema(&s), 10);
        assert_eq!(count_extrema(&s), 10);
    }

    #[test]
    fn plateaus_count_once() {
        // max plateau, min plateau
        let v = [0.0, 1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0];
        assert_eq!(count_extrema(&v), 2);
        // shoulder: plateau between rising parts is not an extremum
        let v = [0.0, 1.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.5];
        assert_eq!(count_extrema(&v), 2);
        // plateau spanning the seam
        let v = [5.0, 5.0, 1.0, 0.0, 1.0, 2.0, 3.0, 5.0];
        let idx = extrema_indices(&v);
        assert_eq!(idx.len(), 2);
        assert!(idx.contains(&3));
    }

    #[test]
    fn linear_ramp_has_seam_extrema() {
        let s = Signal::from_fn(100, |x| -10.0 * x + 20.0).unwrap();
        assert_eq!(extrema_indices(&s), vec![0, 99]);
    }

    #[test]
    fn stopping_value_examples() {
        let g = [1.0, -2.0, 3.0, 0.5, 0.0, 1.0, 2.0, 3.0];
        assert_eq!(stopping_value(&g, &g).unwrap().value, 0.0);
        let g2: Vec<f64> = g.iter().map(|x| 2.0 * x).collect();
        assert!((stopping_value(&g2, &g).unwrap().value - 1.0).abs() < 1e-15);
        let mut e = [0.0; 8];
        e[0] = 1.0;
        assert_eq!(stopping_value(&[0.0; 8], &e).unwrap().value, 1.0);
        let z = stopping_value(&g, &[0.0; 8]).unwrap();
        assert!(z.zero_reference);
        assert_eq!(z.value, 0.0);
        assert!(stopping_value(&g, &e[..7]).is_err());
    }

    #[test]
    fn relative_error_examples() {
        let t = [1.0, 2.0, -1.0, 0.0, 3.0, 1.0, 1.0, 1.0];
        assert_eq!(relative_error(&t, &t).unwrap(), 0.0);
        assert!((relative_error(&[0.0; 8], &t).unwrap() - 1.0).abs() < 1e-15);
        assert!(relative_error(&t, &[0.0; 8]).is_err());
    }

    #[test]
    fn signal_validation() {
        assert!(Signal::new(vec![0.0; 7]).is_err());
        assert!(Signal::new(vec![0.0, 1.0, f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(StoppingConfig::new(0.0, 10).is_err());
        assert!(StoppingConfig::new(1e-3, 0).is_err());
    }

    proptest! {
        #[test]
        fn extrema_invariant_under_affine(
            v in prop::collection::vec(-100i32..100, 8..64),
            c in -50.0f64..50.0,
            a in 0.1f64..10.0,
        ) {
            // Integer-valued samples keep the comparison structure exact under the map.
            let base: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let shifted: Vec<f64> = base.iter().map(|x| x + c.round()).collect();
            let scaled: Vec<f64> = base.iter().map(|x| a * x).collect();
            let k = count_extrema(&base);
            prop_assert_eq!(count_extrema(&shifted), k);
            prop_assert_eq!(count_extrema(&scaled), k);
        }

        #[test]
        fn extrema_match_naive_without_ties(v in prop::collection::vec(-1e3f64..1e3, 8..64)) {
            let n = v.len();
            prop_assume!((0..n).all(|i| v[i] != v[(i + 1) % n]));
            prop_assert_eq!(count_extrema(&v), naive_extrema(&v));
        }

        #[test]
        fn relative_error_scale_invariant(
            pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 8..32),
            a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        ) {
            let (e, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assume!(norm2(&t) > 1e-6);
            let r = relative_error(&e, &t).unwrap();
            let ea: Vec<f64> = e.iter().map(|x| a * x).collect();
            let ta: Vec<f64> = t.iter().map(|x| a * x).collect();
            let ra = relative_error(&ea, &ta).unwrap();
            prop_assert!((r - ra).abs() <= 1e-12 * (1.0 + r));
        }
    }
}
