//! Received power, SNR, feasibility bounds and the covertness diagnostics.
//!
//! The panel applies one phase per element; Willie receives the direct path
//! plus the phase-shifted cascade sum.  Perfect covertness is exactly zero
//! received signal power at Willie: his observation then has the same law
//! whether or not Alice transmits, the KL divergence between the two
//! hypotheses vanishes, and any detector's error probabilities satisfy
//! `alpha + beta = 1`.

use num_complex::Complex64;

use crate::channel::{
    cascade_terms, normalize_phase, CascadeTerm, ChannelParams, ChannelRealization, Receiver,
};
use crate::{Error, Result};

/// Per-element phase configuration, every entry canonicalized to
/// `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    /// Canonicalize `phases`; rejects non-finite entries.
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        for &p in &phases {
            if !p.is_finite() {
                return Err(Error::NonFinitePhase(p));
            }
        }
        Ok(PhaseVector(phases.into_iter().map(normalize_phase).collect()))
    }

    /// The all-zero configuration (panel acts as a plain reflector).
    pub fn zeros(n: usize) -> Self {
        PhaseVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Add a common offset to every phase.  Rotating all elements together
    /// leaves `|indirect_sum|` unchanged; it only steers its direction.
    pub fn rotated(&self, alpha: f64) -> Self {
        PhaseVector(self.0.iter().map(|p| normalize_phase(p + alpha)).collect())
    }
}

impl std::ops::Index<usize> for PhaseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_lengths(phases: &PhaseVector, cascades: &[CascadeTerm]) -> Result<()> {
    if phases.len() != cascades.len() {
        return Err(Error::LengthMismatch { phases: phases.len(), cascades: cascades.len() });
    }
    Ok(())
}

/// Reflected sum `sum_i z_i exp(j phi_i)`.
pub fn indirect_sum(phases: &PhaseVector, cascades: &[CascadeTerm]) -> Result<Complex64> {
    check_lengths(phases, cascades)?;
    Ok(phases
        .iter()
        .zip(cascades)
        .map(|(&phi, term)| term.z * Complex64::from_polar(1.0, phi))
        .sum())
}

/// Signal power at Willie under configuration `phases`:
/// `|h_aw + sum_i z_i exp(j phi_i)|^2`.  Zero means perfect covertness.
pub fn willie_power(
    phases: &PhaseVector,
    cascades: &[CascadeTerm],
    h_aw: Complex64,
) -> Result<f64> {
    Ok((h_aw + indirect_sum(phases, cascades)?).norm_sqr())
}

/// SNR at `receiver` for transmit power `params.tx_power()`.
pub fn snr(
    phases: &PhaseVector,
    realization: &ChannelRealization,
    params: &ChannelParams,
    receiver: Receiver,
) -> Result<f64> {
    let cascades = cascade_terms(realization, receiver);
    let power = willie_power(phases, &cascades, realization.direct(receiver))?;
    Ok(params.tx_power() * power / params.noise_var(receiver))
}

/// Range of `|sum_i z_i exp(j phi_i)|` over all phase choices, compared
/// against the direct-path magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityBounds {
    pub min_mag: f64,
    pub max_mag: f64,
    pub direct_mag: f64,
    /// Whether `|h_aw|` lies inside `[min_mag, max_mag]`, i.e. whether a
    /// perfectly covert configuration exists.
    pub feasible: bool,
}

/// Closed polygon bounds: the maximum aligns every element,
/// `max = sum_i r_i`; the minimum is `0` unless one magnitude dominates all
/// others combined, in which case `min = 2 max_i r_i - sum_i r_i`.
pub fn feasibility_bounds(cascades: &[CascadeTerm], h_aw: Complex64) -> Result<FeasibilityBounds> {
    if cascades.is_empty() {
        return Err(Error::EmptyCascade);
    }
    let total: f64 = cascades.iter().map(|t| t.r).sum();
    let largest = cascades.iter().map(|t| t.r).fold(0.0, f64::max);
    let min_mag = (2.0 * largest - total).max(0.0);
    let direct_mag = h_aw.norm();
    Ok(FeasibilityBounds {
        min_mag,
        max_mag: total,
        direct_mag,
        feasible: min_mag <= direct_mag && direct_mag <= total,
    })
}

/// KL divergence between Willie's observation under silence and under
/// transmission with a Gaussian codebook.  Both hypotheses are circularly
/// symmetric complex Gaussians with variances `noise_var_w` and
/// `tx_power * G + noise_var_w`, where `G` is the received signal power
/// gain, so `D = ln(s1/s0) + s0/s1 - 1`.  Exactly zero when `G = 0`.
pub fn kl_divergence_willie(
    phases: &PhaseVector,
    realization: &ChannelRealization,
    params: &ChannelParams,
) -> Result<f64> {
    let cascades = cascade_terms(realization, Receiver::Willie);
    let gain = willie_power(phases, &cascades, realization.h_aw)?;
    let s0 = params.noise_var(Receiver::Willie);
    let s1 = params.tx_power() * gain + s0;
    Ok((s1 / s0).ln() + s0 / s1 - 1.0)
}

/// Pinsker-style lower bound on the sum of Willie's error probabilities:
/// `alpha + beta >= 1 - sqrt(kl / 2)`.  Not clamped; a value `<= 0` simply
/// carries no information.
pub fn detection_error_bound(kl: f64) -> f64 {
    debug_assert!(kl >= 0.0, "KL divergence must be nonnegative, got {kl}");
    1.0 - (kl / 2.0).sqrt()
}
