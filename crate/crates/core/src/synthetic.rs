//! Artificial test signals with known components, and calibrated Gaussian noise.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::signal::{norm2, Signal};

/// A generated signal with its ground-truth components.
#[derive(Debug, Clone)]
pub struct ExampleSignal {
    pub id: u32,
    pub signal: Signal,
    /// Components in definition order; the last one is the trend.
    pub components: Vec<Signal>,
    /// Instantaneous frequency `|φ′/2π|` of each oscillatory component,
    /// aligned with `components` (the trend has none).
    pub inst_freq: Vec<Vec<f64>>,
}

impl ExampleSignal {
    /// Indices of the oscillatory components sorted by decreasing mean
    /// frequency: the order in which IMFs are expected to come out.
    pub fn imf_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.inst_freq.len()).collect();
        let mean = |i: usize| self.inst_freq[i].iter().sum::<f64>() / self.inst_freq[i].len() as f64;
        idx.sort_by(|&a, &b| mean(b).total_cmp(&mean(a)));
        idx
    }

    /// Ground truth aligned with IMF order, trend last.
    pub fn truths_in_imf_order(&self) -> Vec<&Signal> {
        let mut out: Vec<&Signal> = self.imf_order().into_iter().map(|i| &self.components[i]).collect();
        out.push(self.components.last().expect("trend component"));
        out
    }

    /// Frequency curves aligned with IMF order.
    pub fn curves_in_imf_order(&self) -> Vec<Vec<f64>> {
        self.imf_order()
            .into_iter()
            .map(|i| self.inst_freq[i].clone())
            .collect()
    }
}

/// Builds example 1 (exponential chirps plus a linear trend) or
/// example 2 (sinusoidally modulated chirps plus a cosine trend).
pub fn gen_example(id: u32, n: usize) -> Result<ExampleSignal> {
    type Comp = fn(f64) -> f64;
    let (comps, freqs): (Vec<Comp>, Vec<Comp>) = match id {
        1 => (
            vec![
                |t| (20.0 * (PI * t).exp() + 120.0 * PI * t).cos(),
                |t| (20.0 * (PI * t).exp() + 20.0 * PI * t).cos(),
                |t| -10.0 * t + 20.0,
            ],
            vec![
                |t| 10.0 * (PI * t).exp() + 60.0,
                |t| 10.0 * (PI * t).exp() + 10.0,
            ],
        ),
        2 => (
            vec![
                |t| (20.0 * (4.0 * PI * t).cos() - 160.0 * PI * t).cos(),
                |t| (20.0 * (4.0 * PI * t).cos() - 280.0 * PI * t).cos(),
                |t| (2.0 * PI * t).cos(),
            ],
            vec![
                |t| (-40.0 * (4.0 * PI * t).sin() - 80.0).abs(),
                |t| (-40.0 * (4.0 * PI * t).sin() - 140.0).abs(),
            ],
        ),
        other => return Err(Error::arg(format!("unknown example id {other}"))),
    };
    let components = comps
        .iter()
        .map(|f| Signal::from_fn(n, f))
        .collect::<Result<Vec<_>>>()?;
    let inst_freq = freqs
        .iter()
        .map(|f| (0..n).map(|i| f(i as f64 / n as f64)).collect())
        .collect();
    let mut sum = vec![0.0; n];
    for c in &components {
        for (s, v) in sum.iter_mut().zip(c.iter()) {
            *s += v;
        }
    }
    Ok(ExampleSignal {
        id,
        signal: Signal::new(sum)?,
        components,
        inst_freq,
    })
}

/// Adds i.i.d. Gaussian noise rescaled so the realized SNR is exactly `snr_db`.
///
/// `snr_db = +∞` returns the input unchanged.
pub fn add_noise(s: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    if snr_db == f64::INFINITY {
        return Ok(s.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::arg(format!("invalid SNR {snr_db}")));
    }
    let signal_norm = norm2(s);
    if signal_norm == 0.0 {
        return Err(Error::arg("cannot set an SNR relative to a zero signal"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..s.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = signal_norm / (norm2(&noise) * 10f64.powf(snr_db / 20.0));
    Signal::new(s.iter().zip(&noise).map(|(v, e)| v + scale * e).collect())
}

/// Realized `10·log10(‖clean‖² / ‖noisy − clean‖²)`.
pub fn measured_snr_db(clean: &[f64], noisy: &[f64]) -> f64 {
    let noise: Vec<f64> = noisy.iter().zip(clean).map(|(a, b)| a - b).collect();
    20.0 * (norm2(clean) / norm2(&noise)).log10()
}
