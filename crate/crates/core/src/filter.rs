//! Filter kernels and their circulant discretization.
//!
//! Every built-in kernel is a self-convolution `ω ⋆ ω`, so its Fourier
//! transform is `ω̂²` and therefore nonnegative. On a periodic grid the
//! sampled kernel becomes the first row of a symmetric circulant matrix whose
//! eigenvalues are the DFT of that row.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fast::dft_real;

/// Table resolution used for numerically convolved kernels.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// User-selectable kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// `max(0, 1 − |z|)`: the uniform kernel on `[−1/2, 1/2]` convolved with itself.
    Triangular,
    /// `ω ⋆ ω` with `ω(z) = (π/4)·cos(πz/2)` on `[−1, 1]`, rescaled to support `[−1, 1]`.
    DoubleConvolvedCosine,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Triangular => "triangular",
            FilterKind::DoubleConvolvedCosine => "cosine2",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(FilterKind::Triangular),
            "cosine2" | "double_convolved_cosine" => Ok(FilterKind::DoubleConvolvedCosine),
            other => Err(Error::config(format!("unknown filter kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Triangular,
    Uniform,
    Cosine,
    /// Samples on `u ∈ [−1, 1]`, equally spaced, linearly interpolated.
    Table(Arc<Vec<f64>>),
}

/// An even, nonnegative, compactly supported kernel `k(z) = a·p(z / h)`
/// where `p` lives on `[−1, 1]` and `h` is the half support.
#[derive(Debug, Clone)]
pub struct FilterKernel {
    profile: Profile,
    half_support: f64,
    amplitude: f64,
    kind: Option<FilterKind>,
}

impl FilterKernel {
    /// Uniform density on `[−1/2, 1/2]`.
    pub fn uniform() -> Self {
        Self {
            profile: Profile::Uniform,
            half_support: 0.5,
            amplitude: 1.0,
            kind: None,
        }
    }

    /// `(π/4)·cos(πz/2)` on `[−1, 1]`.
    pub fn cosine() -> Self {
        Self {
            profile: Profile::Cosine,
            half_support: 1.0,
            amplitude: std::f64::consts::FRAC_PI_4,
            kind: None,
        }
    }

    pub fn triangular() -> Self {
        Self {
            profile: Profile::Triangular,
            half_support: 1.0,
            amplitude: 1.0,
            kind: Some(FilterKind::Triangular),
        }
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let u = z.abs() / self.half_support;
        if u > 1.0 {
            return 0.0;
        }
        let p = match &self.profile {
            Profile::Triangular => 1.0 - u,
            Profile::Uniform => 1.0,
            Profile::Cosine => (std::f64::consts::FRAC_PI_2 * u).cos(),
            Profile::Table(t) => {
                // t covers u ∈ [−1, 1]; u ≥ 0 here.
                let last = t.len() - 1;
                let pos = (u + 1.0) * 0.5 * last as f64;
                let i = (pos.floor() as usize).min(last - 1);
                let w = pos - i as f64;
                t[i] * (1.0 - w) + t[i + 1] * w
            }
        };
        self.amplitude * p
    }

    pub fn half_support(&self) -> f64 {
        self.half_support
    }

    /// The built-in family this kernel belongs to, if any.
    pub fn kind(&self) -> Option<FilterKind> {
        self.kind
    }

    /// `∫ k`; exact for closed forms, trapezoid (exact for the interpolant) for tables.
    pub fn mass(&self) -> f64 {
        let profile_mass = match &self.profile {
            Profile::Triangular => 1.0,
            Profile::Uniform => 2.0,
            Profile::Cosine => 4.0 / std::f64::consts::PI,
            Profile::Table(t) => {
                let h = 2.0 / (t.len() - 1) as f64;
                let inner: f64 = t[1..t.len() - 1].iter().sum();
                h * (inner + 0.5 * (t[0] + t[t.len() - 1]))
            }
        };
        self.amplitude * self.half_support * profile_mass
    }

    /// `c·k(z)` for `c > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self.clone()
        }
    }

    /// `a·k(a·z)`: shrinks the support by `a` and keeps the mass.
    pub fn compressed(&self, factor: f64) -> Self {
        Self {
            half_support: self.half_support / factor,
            amplitude: self.amplitude * factor,
            ..self.clone()
        }
    }
}

/// Builds one of the built-in kernels, normalized to half support 1 and unit mass.
pub fn make_filter(kind: FilterKind) -> FilterKernel {
    static COSINE2: OnceLock<FilterKernel> = OnceLock::new();
    match kind {
        FilterKind::Triangular => FilterKernel::triangular(),
        FilterKind::DoubleConvolvedCosine => COSINE2
            .get_or_init(|| {
                let mut k = self_convolve(&FilterKernel::cosine(), DEFAULT_RESOLUTION)
                    .expect("resolution is valid")
                    .compressed(2.0);
                k.kind = Some(FilterKind::DoubleConvolvedCosine);
                k
            })
            .clone(),
    }
}

// 8-point Gauss–Legendre on [−1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const GL_PANELS: usize = 64;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / GL_PANELS as f64;
    let mut acc = 0.0;
    for p in 0..GL_PANELS {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * half * (f(mid - half * x) + f(mid + half * x));
        }
    }
    acc
}

/// Tabulates `(ω ⋆ ω)(z) = ∫ ω(t)·ω(z − t) dt` over the doubled support.
///
/// `resolution` is the number of table intervals (rounded up to even).
pub fn self_convolve(omega: &FilterKernel, resolution: usize) -> Result<FilterKernel> {
    if resolution < 256 {
        return Err(Error::arg(format!(
            "self-convolution resolution must be at least 256, got {resolution}"
        )));
    }
    let intervals = resolution + resolution % 2;
    let h = omega.half_support();
    let out_h = 2.0 * h;
    let mid = intervals / 2;
    let mut table = vec![0.0; intervals + 1];
    for i in 0..=mid {
        let z = out_h * i as f64 / mid as f64;
        // Built-in profiles may kink at the origin of either factor.
        let mut cuts = vec![z - h];
        cuts.extend([0.0, z].into_iter().filter(|&c| c > z - h && c < h));
        cuts.push(h);
        cuts.dedup();
        let v = cuts
            .windows(2)
            .map(|w| integrate(|t| omega.evaluate(t) * omega.evaluate(z - t), w[0], w[1]))
            .sum();
        table[mid + i] = v;
        table[mid - i] = v;
    }
    // Endpoints are exactly zero for any kernel supported on [−h, h].
    table[0] = 0.0;
    table[intervals] = 0.0;
    Ok(FilterKernel {
        profile: Profile::Table(Arc::new(table)),
        half_support: out_h,
        amplitude: 1.0,
        kind: None,
    })
}

/// First row of the symmetric, row-stochastic circulant smoothing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantRow {
    entries: Vec<f64>,
    scale: f64,
    support: usize,
}

impl CirculantRow {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Raw row sum that was divided out.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Largest offset with a nonzero weight.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds a row from raw entries; they must be symmetric, nonnegative
    /// and sum to one.
    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        let n = entries.len();
        if n < 8 {
            return Err(Error::arg("circulant row needs at least 8 entries"));
        }
        for j in 1..n {
            if entries[j] != entries[n - j] {
                return Err(Error::arg(format!("row is not symmetric at offset {j}")));
            }
        }
        if entries.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::arg("row entries must be nonnegative"));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::arg(format!("row sums to {sum}, expected 1")));
        }
        let support = (0..=n / 2).rev().find(|&j| entries[j] > 0.0).unwrap_or(0);
        Ok(Self {
            entries,
            scale: 1.0,
            support,
        })
    }
}

/// Samples `k` with step `inv_length / n` into a circulant first row and
/// normalizes it to unit sum.
///
/// `inv_length` is `M` for the resampled domain of FRIF and `1/L` for IF.
pub fn circulant_row(k: &FilterKernel, n: usize, inv_length: f64) -> Result<CirculantRow> {
    if n < 8 {
        return Err(Error::arg(format!("signal length {n} below 8")));
    }
    if !(inv_length > 0.0 && inv_length.is_finite()) {
        return Err(Error::arg(format!("inverse length must be positive, got {inv_length}")));
    }
    let step = inv_length / n as f64;
    let s = (k.half_support() / step).floor();
    if s >= (n / 2) as f64 {
        return Err(Error::config(format!(
            "filter too wide for signal length: support index {s} with n = {n}"
        )));
    }
    let s = s as usize;
    let mut entries = vec![0.0; n];
    entries[0] = step * k.evaluate(0.0);
    for j in 1..=s {
        let v = step * k.evaluate(j as f64 * step);
        entries[j] = v;
        entries[n - j] = v;
    }
    let sum: f64 = entries.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::config("filter row has zero mass on this grid"));
    }
    for e in &mut entries {
        *e /= sum;
    }
    Ok(CirculantRow {
        entries,
        scale: sum,
        support: s,
    })
}

/// Eigenvalues of the circulant matrix with first row `row`: its DFT, which
/// is real because the row is symmetric.
pub fn spectral_symbol(row: &CirculantRow) -> Result<Vec<f64>> {
    let spectrum = dft_real(row.entries());
    let worst = spectrum.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::Internal(format!(
            "circulant symbol has imaginary residue {worst:e}"
        )));
    }
    let mut symbol: Vec<f64> = spectrum.into_iter().map(|c| c.re).collect();
    // Rows are stochastic: the DC eigenvalue is exactly the unit row sum.
    symbol[0] = 1.0;
    Ok(symbol)
}
