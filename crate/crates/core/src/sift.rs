//! The inner sifting loop shared by every engine.

use crate::signal::{StoppingConfig, StoppingValue, Warning};

/// Iterates are abandoned once their norm exceeds this multiple of the initial norm.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// One inner-loop engine: repeated application of `g ← g − L(g)`.
pub trait Sifter {
    /// Applies one step and returns `‖g_next − g_cur‖ / ‖g_cur‖`.
    fn advance(&mut self) -> StoppingValue;

    /// Current iterate on the original time grid.
    fn iterate(&self) -> Vec<f64>;

    /// Euclidean norm of the current iterate in the engine's own coordinates.
    fn norm(&self) -> f64;
}

/// Output of an inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftOutcome {
    pub imf: Vec<f64>,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub converged: bool,
    pub warnings: Vec<Warning>,
}

impl SiftOutcome {
    pub fn final_stopping_value(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }
}

/// Runs `sifter` until the stopping value drops to `delta`, `max_iter` steps
/// are taken, or the iterate diverges.
pub fn sift_until<S: Sifter>(sifter: &mut S, stop: &StoppingConfig) -> SiftOutcome {
    let initial = sifter.norm();
    let mut history = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = false;
    for _ in 0..stop.max_iter {
        let sv = sifter.advance();
        history.push(sv.value);
        if sv.zero_reference && !warnings.contains(&Warning::ZeroIterate) {
            warnings.push(Warning::ZeroIterate);
        }
        if sifter.norm() > DIVERGENCE_FACTOR * initial {
            warnings.push(Warning::Diverged);
            break;
        }
        if sv.value <= stop.delta {
            converged = true;
            break;
        }
    }
    if !converged && !warnings.contains(&Warning::Diverged) {
        warnings.push(Warning::MaxIterReached);
    }
    SiftOutcome {
        imf: sifter.iterate(),
        iterations: history.len(),
        history,
        converged,
        warnings,
    }
}

/// Runs exactly `steps` steps without a stopping rule, handing each new
/// iterate (1-based step index) to `observe`.
pub fn sift_trace<S: Sifter>(sifter: &mut S, steps: usize, mut observe: impl FnMut(usize, &[f64])) {
    for m in 1..=steps {
        sifter.advance();
        observe(m, &sifter.iterate());
    }
}
