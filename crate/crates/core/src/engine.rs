//! Outer decomposition loop and method dispatch.

use std::fmt;
use std::str::FromStr;

use log::{debug, info};
use serde::Serialize;

use crate::dense::{
    alif_sift, build_alif_matrix, build_rif_dense, rif_dense_sift, salif_scale, salif_sift, DenseSifter,
    DENSE_EIGEN_BUDGET,
};
use crate::error::{Error, Result};
use crate::fast::{fif_sift, FifSifter};
use crate::filter::{circulant_row, make_filter, FilterKernel, FilterKind};
use crate::resample::{
    compute_resampling, default_length_from_extrema, inverse_resample, length_from_freq, resample,
    LengthFunction, ResamplingMap,
};
use crate::sift::{sift_trace, SiftOutcome, Sifter};
use crate::signal::{
    extrema_indices, relative_error, DecompositionResult, ImfDiagnostics, Signal, StoppingConfig, Warning,
};

/// Largest `n` accepted by the dense engines.
pub const DENSE_BUDGET: usize = DENSE_EIGEN_BUDGET;

/// Frequency multiple of the leading noise round used for noisy inputs.
pub const NOISE_ROUND_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "if")]
    If,
    #[serde(rename = "alif")]
    Alif,
    #[serde(rename = "salif")]
    Salif,
    #[serde(rename = "frif")]
    Frif,
    #[serde(rename = "rif-dense")]
    RifDense,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::If, Method::Alif, Method::Salif, Method::Frif, Method::RifDense];

    pub fn name(self) -> &'static str {
        match self {
            Method::If => "if",
            Method::Alif => "alif",
            Method::Salif => "salif",
            Method::Frif => "frif",
            Method::RifDense => "rif-dense",
        }
    }

    /// Whether the engine stores an `n × n` matrix.
    pub fn is_dense(self) -> bool {
        matches!(self, Method::Alif | Method::Salif | Method::RifDense)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::arg(format!("unknown method '{s}' (expected if|alif|salif|frif|rif-dense)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    pub filter: FilterKind,
    pub stopping: StoppingConfig,
    pub xi: f64,
    pub max_imfs: usize,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            filter: FilterKind::Triangular,
            stopping: StoppingConfig::default(),
            xi: 2.0,
            max_imfs: 12,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_imfs == 0 {
            return Err(Error::arg("max_imfs must be at least 1"));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::arg(format!("xi must be positive, got {}", self.xi)));
        }
        Ok(())
    }
}

/// Length function for one extraction round plus how it was obtained.
#[derive(Debug, Clone)]
pub struct RoundLength {
    pub ell: LengthFunction,
    pub warnings: Vec<Warning>,
}

/// Supplies `ℓ` for each extraction round.
pub trait LengthProvider {
    /// `Ok(None)` means the source has nothing for this round.
    fn next_length(&mut self, round: usize, residual: &Signal, xi: f64) -> Result<Option<RoundLength>>;
}

fn heuristic_round(residual: &Signal, xi: f64) -> Result<RoundLength> {
    let (ell, clamped) = default_length_from_extrema(residual, xi)?;
    let mut warnings = vec![Warning::HeuristicLength];
    if clamped {
        warnings.push(Warning::LengthClamped);
    }
    Ok(RoundLength { ell, warnings })
}

/// `ℓ` re-derived from the current residual's extrema every round.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtremaLengths;

impl LengthProvider for ExtremaLengths {
    fn next_length(&mut self, _round: usize, residual: &Signal, xi: f64) -> Result<Option<RoundLength>> {
        heuristic_round(residual, xi).map(Some)
    }
}

/// `ℓ = ξ / f` from known instantaneous-frequency curves, one per round,
/// optionally preceded by a round that strips content above the top curve.
#[derive(Debug, Clone)]
pub struct AnalyticLengths {
    curves: Vec<Vec<f64>>,
    noise_factor: Option<f64>,
}

impl AnalyticLengths {
    /// Curves in extraction order (highest frequency first).
    pub fn new(curves: Vec<Vec<f64>>) -> Self {
        Self {
            curves,
            noise_factor: None,
        }
    }

    /// Adds a leading round with `ℓ = ℓ_top / factor`, which takes out
    /// broadband content above the first curve before the known components.
    pub fn with_noise_round(mut self, factor: f64) -> Self {
        self.noise_factor = Some(factor);
        self
    }
}

impl LengthProvider for AnalyticLengths {
    fn next_length(&mut self, round: usize, residual: &Signal, xi: f64) -> Result<Option<RoundLength>> {
        let (curve, factor) = match self.noise_factor {
            Some(f) if round == 0 => (self.curves.first(), f),
            Some(_) => (self.curves.get(round - 1), 1.0),
            None => (self.curves.get(round), 1.0),
        };
        let Some(curve) = curve else {
            return Ok(None);
        };
        if curve.len() != residual.len() {
            return Err(Error::arg(format!(
                "frequency curve has {} samples, signal has {}",
                curve.len(),
                residual.len()
            )));
        }
        let freq: Vec<f64> = curve.iter().map(|f| f * factor).collect();
        let (ell, clamped) = length_from_freq(&freq, xi)?;
        Ok(Some(RoundLength {
            ell,
            warnings: if clamped { vec![Warning::LengthClamped] } else { Vec::new() },
        }))
    }
}

/// Precomputed `ℓ` per round (e.g. loaded from a file), then the extrema
/// heuristic once the table runs out.
#[derive(Debug, Clone)]
pub struct TableLengths {
    rounds: Vec<LengthFunction>,
}

impl TableLengths {
    pub fn new(rounds: Vec<LengthFunction>) -> Self {
        Self { rounds }
    }
}

impl LengthProvider for TableLengths {
    fn next_length(&mut self, round: usize, residual: &Signal, xi: f64) -> Result<Option<RoundLength>> {
        match self.rounds.get(round) {
            Some(ell) if ell.len() != residual.len() => Err(Error::arg(format!(
                "length column has {} samples, signal has {}",
                ell.len(),
                residual.len()
            ))),
            Some(ell) => Ok(Some(RoundLength {
                ell: ell.clone(),
                warnings: Vec::new(),
            })),
            None => heuristic_round(residual, xi).map(Some),
        }
    }
}

struct Extraction {
    outcome: SiftOutcome,
    scale_used: f64,
    warped_length: Option<f64>,
}

fn check_dense_budget(method: Method, n: usize) -> Result<()> {
    if method.is_dense() && n > DENSE_BUDGET {
        return Err(Error::Budget(format!(
            "{method} stores an n×n matrix; n = {n} exceeds {DENSE_BUDGET}"
        )));
    }
    Ok(())
}

fn extract(cfg: &MethodConfig, k: &FilterKernel, r: &Signal, ell: &LengthFunction) -> Result<Extraction> {
    let n = r.len();
    let stop = &cfg.stopping;
    Ok(match cfg.method {
        Method::If => {
            let inv = 1.0 / ell.mean();
            let row = circulant_row(k, n, inv)?;
            Extraction {
                outcome: fif_sift(r, &row, stop)?,
                scale_used: row.scale(),
                warped_length: Some(inv),
            }
        }
        Method::Frif => {
            let map = compute_resampling(ell)?;
            let h = resample(r, &map)?;
            let row = circulant_row(k, n, map.m_total())?;
            let mut outcome = fif_sift(&h, &row, stop)?;
            outcome.imf = inverse_resample(&Signal::new(outcome.imf)?, &map)?.into_values();
            Extraction {
                outcome,
                scale_used: row.scale(),
                warped_length: Some(map.m_total()),
            }
        }
        Method::Alif => {
            let op = build_alif_matrix(k, ell, n)?;
            Extraction {
                outcome: alif_sift(&op, r, stop)?,
                scale_used: op.scale_used,
                warped_length: None,
            }
        }
        Method::Salif => {
            let op = build_alif_matrix(k, ell, n)?;
            Extraction {
                outcome: salif_sift(&op, r, stop)?,
                scale_used: salif_scale(&op.matrix),
                warped_length: None,
            }
        }
        Method::RifDense => {
            let op = build_rif_dense(k, ell, n)?;
            Extraction {
                outcome: rif_dense_sift(&op, r, stop)?,
                scale_used: op.rho,
                warped_length: None,
            }
        }
    })
}

/// Residual counts as a trend: fewer than two extrema, or only the
/// endpoint extrema produced by a jump across the periodic seam.
fn trend_state(r: &[f64]) -> Option<Option<Warning>> {
    let idx = extrema_indices(r);
    let n = r.len();
    if idx.len() < 2 {
        Some(None)
    } else if idx.iter().all(|&i| i == 0 || i == n - 1) {
        Some(Some(Warning::SeamExtrema))
    } else {
        None
    }
}

/// Extracts IMFs from `g` until the residual is a trend, the IMF cap is
/// reached, or the length source is exhausted.
///
/// Failures in the first round are returned as errors (a resampling length
/// `M ≤ 2` is a [`Error::Trend`]); in later rounds they end the loop and the
/// residual becomes the trend.
pub fn decompose(g: &Signal, cfg: &MethodConfig, provider: &mut dyn LengthProvider) -> Result<DecompositionResult> {
    cfg.validate()?;
    check_dense_budget(cfg.method, g.len())?;
    let k = make_filter(cfg.filter);
    let mut r = g.values().to_vec();
    let mut imfs = Vec::new();
    let mut diagnostics = Vec::new();
    let mut warnings = Vec::new();
    let mut stop_reason = None;

    loop {
        if let Some(seam) = trend_state(&r) {
            warnings.extend(seam);
            break;
        }
        let round = imfs.len();
        if round >= cfg.max_imfs {
            warnings.push(Warning::ImfCapReached);
            break;
        }
        let residual = Signal::new(r.clone())?;
        let attempt = provider
            .next_length(round, &residual, cfg.xi)
            .and_then(|opt| opt.map(|rl| extract(cfg, &k, &residual, &rl.ell).map(|x| (rl, x))).transpose());
        let (rl, ex) = match attempt {
            Ok(Some(v)) => v,
            Ok(None) => {
                warnings.push(Warning::LengthSourceExhausted);
                break;
            }
            Err(e) if round == 0 || matches!(e, Error::Internal(_)) => return Err(e),
            Err(e) => {
                info!("stopping after {round} IMFs: {e}");
                warnings.push(Warning::StoppedOnConfig);
                stop_reason = Some(e.to_string());
                break;
            }
        };
        let out = ex.outcome;
        debug!(
            "IMF {} via {}: {} iterations, final stopping value {:.3e}",
            round + 1,
            cfg.method,
            out.iterations,
            out.final_stopping_value()
        );
        for (ri, v) in r.iter_mut().zip(&out.imf) {
            *ri -= v;
        }
        let mut w = rl.warnings;
        w.extend(out.warnings.iter().copied());
        diagnostics.push(ImfDiagnostics {
            iterations: out.iterations,
            final_stopping_value: out.final_stopping_value(),
            stopping_history: out.history.clone(),
            scale_used: ex.scale_used,
            warped_length: ex.warped_length,
            warnings: w,
        });
        imfs.push(Signal::new(out.imf)?);
    }

    Ok(DecompositionResult {
        imfs,
        residual: Signal::new(r)?,
        diagnostics,
        warnings,
        stop_reason,
    })
}

struct FrifTrace<'a> {
    inner: FifSifter,
    map: &'a ResamplingMap,
}

impl Sifter for FrifTrace<'_> {
    fn advance(&mut self) -> crate::signal::StoppingValue {
        self.inner.advance()
    }

    fn iterate(&self) -> Vec<f64> {
        let warped = Signal::new(self.inner.iterate()).expect("finite iterate");
        inverse_resample(&warped, self.map)
            .expect("grid sizes agree")
            .into_values()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }
}

/// Relative error against `truth` after each of `steps` inner steps of the
/// first extraction round, with the stopping rule disabled.
pub fn convergence_trace(
    g: &Signal,
    cfg: &MethodConfig,
    ell: &LengthFunction,
    truth: &[f64],
    steps: usize,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_dense_budget(cfg.method, g.len())?;
    if truth.len() != g.len() {
        return Err(Error::arg("truth and signal lengths differ"));
    }
    let n = g.len();
    let k = make_filter(cfg.filter);
    let mut errs = Vec::with_capacity(steps);
    let mut record = |_: usize, it: &[f64]| errs.push(relative_error(it, truth).unwrap_or(f64::NAN));
    match cfg.method {
        Method::If => {
            let row = circulant_row(&k, n, 1.0 / ell.mean())?;
            sift_trace(&mut FifSifter::new(g, &row)?, steps, &mut record);
        }
        Method::Frif => {
            let map = compute_resampling(ell)?;
            let h = resample(g, &map)?;
            let row = circulant_row(&k, n, map.m_total())?;
            let mut s = FrifTrace {
                inner: FifSifter::new(&h, &row)?,
                map: &map,
            };
            sift_trace(&mut s, steps, &mut record);
        }
        Method::Alif | Method::Salif => {
            let op = build_alif_matrix(&k, ell, n)?;
            let mut s = if cfg.method == Method::Alif {
                DenseSifter::alif(&op, g)?
            } else {
                DenseSifter::salif(&op, g)?
            };
            sift_trace(&mut s, steps, &mut record);
        }
        Method::RifDense => {
            let op = build_rif_dense(&k, ell, n)?;
            sift_trace(&mut DenseSifter::rif(&op, g)?, steps, &mut record);
        }
    }
    Ok(errs)
}
