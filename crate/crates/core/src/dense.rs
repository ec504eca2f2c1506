//! Dense-matrix engines: ALIF, SALIF and interpolation-free RIF.
//!
//! These are `O(n²)` per step and serve both as methods in their own right
//! and as reference oracles for the FFT engines.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::FilterKernel;
use crate::resample::{compute_resampling, LengthFunction};
use crate::signal::{StoppingConfig, StoppingValue};
use crate::sift::{sift_until, SiftOutcome, Sifter};

/// Largest `n` for which a full dense eigensolve is attempted.
pub const DENSE_EIGEN_BUDGET: usize = 2048;

const LANCZOS_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    RowStochastic,
    Raw,
}

/// A dense smoothing operator together with the scaling applied to it.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<f64>,
    pub normalization: Normalization,
    /// Row-stochastic ALIF: largest raw row sum. Scaled RIF: the divisor `ρ̂`.
    pub scale_used: f64,
}

impl DenseOperator {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
            normalization: Normalization::RowStochastic,
            scale_used: 1.0,
        }
    }
}

/// `x` reduced to `(−p/2, p/2]`.
fn wrap(x: f64, period: f64) -> f64 {
    let r = x - period * (x / period).round();
    if r <= -0.5 * period {
        r + period
    } else {
        r
    }
}

/// `K[i][j] = k(wrap(x_i − x_j) / ℓ_i) / (n·ℓ_i)`, then each row divided by its sum.
pub fn build_alif_matrix(k: &FilterKernel, ell: &LengthFunction, n: usize) -> Result<DenseOperator> {
    if ell.len() != n {
        return Err(Error::arg(format!(
            "length function has {} samples, expected {n}",
            ell.len()
        )));
    }
    let nf = n as f64;
    let hs = k.half_support();
    let mut m = DMatrix::zeros(n, n);
    let mut max_sum: f64 = 0.0;
    for (i, &li) in ell.values().iter().enumerate() {
        // Offsets whose wrapped distance is inside the stretched support.
        let reach = ((nf * li * hs).floor() as usize).min((n - 1) / 2);
        let mut sum = 0.0;
        for o in 0..=reach {
            let v = k.evaluate(wrap(o as f64 / nf, 1.0) / li) / (nf * li);
            if v == 0.0 {
                continue;
            }
            m[(i, (i + n - o) % n)] = v;
            sum += v;
            if o > 0 {
                m[(i, (i + o) % n)] = v;
                sum += v;
            }
        }
        if !(sum > 0.0) {
            return Err(Error::config(format!(
                "grid too coarse for ℓ: row {i} has no weight (ℓ = {li})"
            )));
        }
        max_sum = max_sum.max(sum);
        for j in 0..n {
            m[(i, j)] /= sum;
        }
    }
    Ok(DenseOperator {
        matrix: m,
        normalization: Normalization::RowStochastic,
        scale_used: max_sum,
    })
}

/// `sqrt(‖K‖₁·‖K‖∞)`, an upper bound on the spectral norm.
pub fn salif_scale(k: &DMatrix<f64>) -> f64 {
    let col = k
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = k
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (col * row).sqrt()
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// `g − K g`
    Plain,
    /// `g − c·Kᵀ(K g)`
    Normal(f64),
}

/// Dense inner loop over a fixed operator.
#[derive(Debug, Clone)]
pub struct DenseSifter<'a> {
    matrix: &'a DMatrix<f64>,
    step: Step,
    g: DVector<f64>,
}

impl<'a> DenseSifter<'a> {
    fn new(matrix: &'a DMatrix<f64>, g: &[f64], step: Step) -> Result<Self> {
        if matrix.nrows() != g.len() {
            return Err(Error::arg(format!(
                "operator is {}×{}, signal has {} samples",
                matrix.nrows(),
                matrix.ncols(),
                g.len()
            )));
        }
        Ok(Self {
            matrix,
            step,
            g: DVector::from_column_slice(g),
        })
    }

    /// `g ← (I − K) g`.
    pub fn alif(k: &'a DenseOperator, g: &[f64]) -> Result<Self> {
        Self::new(&k.matrix, g, Step::Plain)
    }

    /// `g ← (I − s⁻²KᵀK) g` with `s = sqrt(‖K‖₁‖K‖∞)`.
    pub fn salif(k: &'a DenseOperator, g: &[f64]) -> Result<Self> {
        let s = salif_scale(&k.matrix);
        Self::new(&k.matrix, g, Step::Normal(1.0 / (s * s)))
    }

    /// `g ← (I − AD/ρ̂) g`.
    pub fn rif(op: &'a RifDense, g: &[f64]) -> Result<Self> {
        Self::new(&op.scaled.matrix, g, Step::Plain)
    }
}

impl Sifter for DenseSifter<'_> {
    fn advance(&mut self) -> StoppingValue {
        let kg = self.matrix * &self.g;
        let update = match self.step {
            Step::Plain => kg,
            Step::Normal(c) => self.matrix.tr_mul(&kg) * c,
        };
        let cur = self.g.norm();
        let diff = update.norm();
        self.g -= update;
        if cur == 0.0 {
            StoppingValue {
                value: 0.0,
                zero_reference: true,
            }
        } else {
            StoppingValue {
                value: diff / cur,
                zero_reference: false,
            }
        }
    }

    fn iterate(&self) -> Vec<f64> {
        self.g.as_slice().to_vec()
    }

    fn norm(&self) -> f64 {
        self.g.norm()
    }
}

/// ALIF inner loop. Convergence is not guaranteed; divergence is reported
/// through the outcome's warnings.
pub fn alif_sift(k: &DenseOperator, g: &[f64], stop: &StoppingConfig) -> Result<SiftOutcome> {
    Ok(sift_until(&mut DenseSifter::alif(k, g)?, stop))
}

/// SALIF inner loop; `‖g_m‖₂` never increases.
pub fn salif_sift(k: &DenseOperator, g: &[f64], stop: &StoppingConfig) -> Result<SiftOutcome> {
    Ok(sift_until(&mut DenseSifter::salif(k, g)?, stop))
}

/// Interpolation-free RIF operator on the original grid.
#[derive(Debug, Clone)]
pub struct RifDense {
    /// `A[i][j] = k(H(x_i) − H(x_j)) / (n − 1)`, symmetric.
    pub a: DenseOperator,
    /// `D = diag(1/ℓ(x_i))`.
    pub d: Vec<f64>,
    /// Lanczos estimate of `λ_max(D^{1/2} A D^{1/2})`.
    pub rho: f64,
    /// `A·D / ρ̂`.
    pub scaled: DenseOperator,
}

impl RifDense {
    /// `D^{1/2} A D^{1/2} / ρ̂`, similar to the scaled iteration operator.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let n = self.d.len();
        let sq: Vec<f64> = self.d.iter().map(|v| v.sqrt()).collect();
        DMatrix::from_fn(n, n, |i, j| sq[i] * self.a.matrix[(i, j)] * sq[j] / self.rho)
    }
}

/// Builds `A`, `D` and the scaled product `AD/ρ̂` for the warp `H = G⁻¹`
/// derived from `ell`, with differences of `H` wrapped to `(−M/2, M/2]`.
pub fn build_rif_dense(k: &FilterKernel, ell: &LengthFunction, n: usize) -> Result<RifDense> {
    if ell.len() != n {
        return Err(Error::arg(format!(
            "length function has {} samples, expected {n}",
            ell.len()
        )));
    }
    let map = compute_resampling(ell)?;
    let h = map.g_inv_table();
    let m_total = map.m_total();
    let hs = k.half_support();
    let denom = (n - 1) as f64;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let z = wrap(h[i] - h[j], m_total);
        if z.abs() > hs {
            0.0
        } else {
            k.evaluate(z) / denom
        }
    });
    let d: Vec<f64> = ell.values().iter().map(|l| 1.0 / l).collect();
    let rho = top_eigenvalue_weighted(&a, &d);
    if !(rho > 0.0) {
        return Err(Error::config("RIF operator has no positive spectrum"));
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[j] / rho);
    Ok(RifDense {
        a: DenseOperator {
            matrix: a,
            normalization: Normalization::Raw,
            scale_used: 1.0,
        },
        d,
        rho,
        scaled: DenseOperator {
            matrix: scaled,
            normalization: Normalization::Raw,
            scale_used: rho,
        },
    })
}

/// Largest eigenvalue of `D^{1/2} A D^{1/2}` by Lanczos with full
/// reorthogonalization, started from `D^{1/2}·1`, which is close to the
/// dominant eigenvector because `AD·1 ≈ 1`.
fn top_eigenvalue_weighted(a: &DMatrix<f64>, d: &[f64]) -> f64 {
    let n = d.len();
    let sq = DVector::from_iterator(n, d.iter().map(|v| v.sqrt()));
    let apply = |v: &DVector<f64>| sq.component_mul(&(a * sq.component_mul(v)));
    let max_steps = n.min(LANCZOS_STEPS);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(max_steps);
    let mut alpha = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);
    let mut q = sq.clone() / sq.norm();
    let mut top = f64::NEG_INFINITY;
    for step in 0..max_steps {
        let mut w = apply(&q);
        alpha.push(q.dot(&w));
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let b = w.norm();
        let converged = if step % 10 == 9 || b <= 1e-13 * alpha[0].abs() || step + 1 == max_steps {
            let m = alpha.len();
            let t = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
                0 => alpha[i],
                1 => beta[i.min(j)],
                _ => 0.0,
            });
            let next = symmetric_eigenvalues(&t)[m - 1];
            let done = (next - top).abs() <= 1e-15 * next.abs();
            top = next;
            done
        } else {
            false
        };
        if converged || b <= 1e-13 * alpha[0].abs() {
            break;
        }
        beta.push(b);
        q = w / b;
    }
    top
}

/// RIF inner loop on the original grid; contractive in the `D^{1/2}`-weighted norm.
pub fn rif_dense_sift(op: &RifDense, g: &[f64], stop: &StoppingConfig) -> Result<SiftOutcome> {
    Ok(sift_until(&mut DenseSifter::rif(op, g)?, stop))
}

/// Eigenvalues of a dense operator checked against `|1 − λ| ≤ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    pub n: usize,
    pub num_violations: usize,
    pub max_violation: f64,
    /// Eigenvalues whose imaginary part exceeds `1e-9` in magnitude.
    pub num_complex: usize,
    /// Eigenvalues with real part below `−1e-9`.
    pub num_negative: usize,
    pub min_real: f64,
    pub max_real: f64,
}

/// Tolerance on `|1 − λ| ≤ 1`.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Full eigendecomposition of `K` and the count of eigenvalues violating the
/// necessary convergence condition `|1 − λ| ≤ 1`.
pub fn spectral_diagnostics(k: &DenseOperator) -> Result<SpectralReport> {
    let n = k.n();
    if n > DENSE_EIGEN_BUDGET {
        return Err(Error::Budget(format!(
            "n = {n} exceeds the dense eigensolver budget of {DENSE_EIGEN_BUDGET}; \
             use the circulant spectral symbol for constant-length filters"
        )));
    }
    let eigenvalues: Vec<Complex64> = k
        .matrix
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    Ok(report_from_eigenvalues(eigenvalues))
}

pub(crate) fn report_from_eigenvalues(eigenvalues: Vec<Complex64>) -> SpectralReport {
    let mut num_violations = 0;
    let mut max_violation: f64 = 0.0;
    for l in &eigenvalues {
        let excess = (Complex64::new(1.0, 0.0) - l).norm() - 1.0;
        if excess > VIOLATION_TOL {
            num_violations += 1;
        }
        max_violation = max_violation.max(excess);
    }
    SpectralReport {
        n: eigenvalues.len(),
        num_violations,
        max_violation,
        num_complex: eigenvalues.iter().filter(|l| l.im.abs() > 1e-9).count(),
        num_negative: eigenvalues.iter().filter(|l| l.re < -1e-9).count(),
        min_real: eigenvalues.iter().map(|l| l.re).fold(f64::INFINITY, f64::min),
        max_real: eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max),
        eigenvalues,
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
