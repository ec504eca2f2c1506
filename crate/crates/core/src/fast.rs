//! FFT inner loop for circulant operators (FIF, and FRIF after resampling).

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::filter::{spectral_symbol, CirculantRow};
use crate::signal::{StoppingConfig, StoppingValue};
use crate::sift::{sift_until, SiftOutcome, Sifter};

/// Unnormalized forward DFT of a real sequence.
pub fn dft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT (normalized by `1/n`), returning the full complex result.
pub fn idft(mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
    let n = spectrum.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    let inv = 1.0 / n as f64;
    for c in &mut spectrum {
        *c *= inv;
    }
    spectrum
}

/// Inverse DFT keeping only the real part.
pub fn idft_real(spectrum: Vec<Complex64>) -> Vec<f64> {
    idft(spectrum).into_iter().map(|c| c.re).collect()
}

/// Per-bin multiplier `1 − DFT(row)`, clamped into `[−1, 1]`.
pub fn sift_symbol(row: &CirculantRow) -> Result<Vec<f64>> {
    Ok(spectral_symbol(row)?
        .into_iter()
        .map(|v| (1.0 - v).clamp(-1.0, 1.0))
        .collect())
}

/// Spectral-domain state of the FIF inner loop: `ĥ_{m+1} = σ ∘ ĥ_m`.
#[derive(Debug, Clone)]
pub struct FifSifter {
    coeffs: Vec<Complex64>,
    symbol: Vec<f64>,
    input_sup: f64,
}

impl FifSifter {
    pub fn new(h: &[f64], row: &CirculantRow) -> Result<Self> {
        if h.len() != row.len() {
            return Err(Error::arg(format!(
                "signal length {} does not match row length {}",
                h.len(),
                row.len()
            )));
        }
        Ok(Self {
            coeffs: dft_real(h),
            symbol: sift_symbol(row)?,
            input_sup: h.iter().fold(0.0, |a, v| a.max(v.abs())),
        })
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Leaves the spectral domain, checking that the iterate is real.
    pub fn finish(&self) -> Result<Vec<f64>> {
        let out = idft(self.coeffs.clone());
        let residue = out.iter().fold(0.0_f64, |a, c| a.max(c.im.abs()));
        if residue > 1e-9 * self.input_sup.max(f64::MIN_POSITIVE) {
            return Err(Error::Internal(format!(
                "FIF output has imaginary residue {residue:e}"
            )));
        }
        Ok(out.into_iter().map(|c| c.re).collect())
    }
}

impl Sifter for FifSifter {
    fn advance(&mut self) -> StoppingValue {
        let mut diff = 0.0;
        let mut cur = 0.0;
        for (c, &s) in self.coeffs.iter_mut().zip(&self.symbol) {
            let p = c.norm_sqr();
            cur += p;
            diff += (s - 1.0) * (s - 1.0) * p;
            *c *= s;
        }
        if cur == 0.0 {
            StoppingValue {
                value: 0.0,
                zero_reference: true,
            }
        } else {
            StoppingValue {
                value: (diff / cur).sqrt(),
                zero_reference: false,
            }
        }
    }

    fn iterate(&self) -> Vec<f64> {
        idft_real(self.coeffs.clone())
    }

    fn norm(&self) -> f64 {
        // Parseval: ‖h‖ = ‖ĥ‖ / √n
        let n = self.coeffs.len() as f64;
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt()
    }
}

/// Iterates `h ← (I − K)h` for the circulant `K` with first row `row`,
/// entirely in the frequency domain, with one forward and one inverse DFT.
pub fn fif_sift(h: &[f64], row: &CirculantRow, stop: &StoppingConfig) -> Result<SiftOutcome> {
    let mut sifter = FifSifter::new(h, row)?;
    let mut out = sift_until(&mut sifter, stop);
    out.imf = sifter.finish()?;
    Ok(out)
}
