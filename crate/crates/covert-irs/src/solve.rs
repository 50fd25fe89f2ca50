//! Shared solver outcome types.

use num_complex::Complex64;

use crate::channel::{cascade_terms, CascadeTerm, ChannelParams, ChannelRealization, Receiver};
use crate::covertness::PhaseVector;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Residual Willie power reached the stop threshold.
    Converged,
    /// `|h_aw|` lies outside the reachable magnitude range; no phase
    /// configuration is perfectly covert.
    Infeasible,
    /// Every restart ran out of iterations away from any critical point.
    MaxIterations,
    /// Ended at a critical point that is not the global minimum.
    SaddleDetected,
}

/// Where the final iterate sits in the critical-point landscape of the
/// objective `|a + sum_i z_i exp(j phi_i)|^2` (every critical
/// point aligns all terms co-axially, and everything between the global
/// extremes is a strict saddle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    GlobalMinimum,
    StrictSaddle,
    GlobalMaximum,
    /// Gradient is not (numerically) zero.
    NonCritical,
}

/// Result of any solver in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Panel configuration; entries in `(-pi, pi]`.
    pub phases: PhaseVector,
    /// `|h_aw + sum z_i exp(j phi_i)|^2` at `phases`.
    pub residual_power: f64,
    pub bob_snr: f64,
    pub willie_snr: f64,
    /// Iterations spent across all restarts (`0` for closed forms).
    pub iterations: usize,
    pub status: SolveStatus,
    pub classification: Classification,
}

/// Everything a Willie-side solver needs to report Bob's SNR (and scale
/// Willie's) alongside its own result.
#[derive(Debug, Clone)]
pub struct BobContext {
    pub cascades: Vec<CascadeTerm>,
    pub h_ab: Complex64,
    pub tx_power: f64,
    pub noise_var_w: f64,
    pub noise_var_b: f64,
}

impl BobContext {
    pub fn new(realization: &ChannelRealization, params: &ChannelParams) -> Self {
        BobContext {
            cascades: cascade_terms(realization, Receiver::Bob),
            h_ab: realization.h_ab,
            tx_power: params.tx_power(),
            noise_var_w: params.noise_var(Receiver::Willie),
            noise_var_b: params.noise_var(Receiver::Bob),
        }
    }

    /// Bob's SNR under `phases`.
    pub fn bob_snr(&self, phases: &PhaseVector) -> crate::Result<f64> {
        let power = crate::covertness::willie_power(phases, &self.cascades, self.h_ab)?;
        Ok(self.tx_power * power / self.noise_var_b)
    }

    /// Willie's SNR given his received signal power.
    pub fn willie_snr(&self, willie_power: f64) -> f64 {
        self.tx_power * willie_power / self.noise_var_w
    }
}
