//! Closed-form perfect-covertness solver for a two-element panel.
//!
//! With two cascades the magnitude equation `|z1 e^{j phi1} + z2| = c` has
//! the explicit solution `phi1 = phi_z2 - phi_z1 +/- arccos((c^2 - r1^2 -
//! r2^2) / (2 r1 r2))`, giving exactly two candidate configurations (which
//! coincide at the feasibility boundary).  A common rotation then points
//! the indirect sum against the direct path, and the candidate with the
//! larger Bob SNR wins.

use num_complex::Complex64;

use crate::channel::{normalize_phase, CascadeTerm, ChannelParams, Receiver};
use crate::covertness::{feasibility_bounds, willie_power, PhaseVector};
use crate::solve::{SolveResult, SolveStatus};
use crate::{Error, Result};

/// Residual acceptance: `willie_power <= TOL_REL * (r1 + r2 + c)^2`.
const TOL_REL: f64 = 1e-12;

/// Slop allowed on the arccos argument before the target is declared
/// unreachable; covers targets sitting exactly on the feasibility boundary.
const CLAMP_WINDOW: f64 = 1e-9;

/// Both closed-form candidates with their residual Willie powers and Bob SNRs.
#[derive(Debug, Clone, PartialEq)]
pub struct N2Candidates {
    pub phi_a: PhaseVector,
    pub phi_b: PhaseVector,
    pub residual_a: f64,
    pub residual_b: f64,
    pub bob_snr_a: f64,
    pub bob_snr_b: f64,
}

/// The two relative phases `phi1` solving `|z1 e^{j phi1} + z2| = c`
/// (with `phi2 = 0` implied).  At a boundary target the pair coincides;
/// both values are returned either way.
pub fn solve_magnitude_n2(z1: &CascadeTerm, z2: &CascadeTerm, c: f64) -> Result<(f64, f64)> {
    if c < 0.0 {
        return Err(Error::NegativeArgument(c));
    }
    let (r1, r2) = (z1.r, z2.r);
    if r1 == 0.0 || r2 == 0.0 {
        return Err(Error::DegenerateElement);
    }
    let t = (c * c - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    if !(-1.0 - CLAMP_WINDOW..=1.0 + CLAMP_WINDOW).contains(&t) {
        return Err(Error::InfeasibleMagnitude {
            target: c,
            min: (r1 - r2).abs(),
            max: r1 + r2,
        });
    }
    let delta = t.clamp(-1.0, 1.0).acos();
    let base = z2.phase - z1.phase;
    Ok((normalize_phase(base + delta), normalize_phase(base - delta)))
}

/// Exact two-element solve: both candidates at target `c = |h_aw|`, rotated so the
/// indirect sum opposes `h_aw`, with the better-for-Bob candidate selected.
///
/// Infeasibility is a [`SolveStatus`], not an error; the returned result
/// then holds the honest metrics of the all-zero configuration.
pub fn solve_n2(
    cascades: &[CascadeTerm],
    h_aw: Complex64,
    bob_cascades: &[CascadeTerm],
    h_ab: Complex64,
    params: &ChannelParams,
) -> Result<SolveResult> {
    let candidates = n2_candidates(cascades, h_aw, bob_cascades, h_ab, params)?;
    match candidates {
        None => infeasible_result(cascades, h_aw, bob_cascades, h_ab, params),
        Some(c) => {
            let (phases, residual, bob_snr) = if c.bob_snr_a >= c.bob_snr_b {
                (c.phi_a, c.residual_a, c.bob_snr_a)
            } else {
                (c.phi_b, c.residual_b, c.bob_snr_b)
            };
            let willie_snr = params.tx_power() * residual / params.noise_var(Receiver::Willie);
            let classification = crate::solver_gd::classify_for(&phases, cascades, h_aw);
            Ok(SolveResult {
                phases,
                residual_power: residual,
                bob_snr,
                willie_snr,
                iterations: 0,
                status: SolveStatus::Converged,
                classification,
            })
        }
    }
}

/// Compute both candidates, or `None` when the instance is infeasible.
pub fn n2_candidates(
    cascades: &[CascadeTerm],
    h_aw: Complex64,
    bob_cascades: &[CascadeTerm],
    h_ab: Complex64,
    params: &ChannelParams,
) -> Result<Option<N2Candidates>> {
    if cascades.len() != 2 {
        return Err(Error::ElementCount { requirement: "exactly 2", got: cascades.len() });
    }
    if bob_cascades.len() != 2 {
        return Err(Error::ElementCount { requirement: "exactly 2", got: bob_cascades.len() });
    }
    let (z1, z2) = (&cascades[0], &cascades[1]);
    let c = h_aw.norm();

    let (phi1_a, phi1_b) = match solve_magnitude_n2(z1, z2, c) {
        Ok(pair) => pair,
        Err(Error::DegenerateElement) => match degenerate_candidate(z1, z2, c) {
            // The surviving element must match the target on its own; any
            // phase works for the dead one.  Both candidates coincide.
            Some(phi1) => (phi1, phi1),
            None => return Ok(None),
        },
        Err(Error::InfeasibleMagnitude { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };

    let build = |phi1: f64| -> Result<(PhaseVector, f64, f64)> {
        let pre = PhaseVector::new(vec![phi1, 0.0])?;
        let sum = crate::covertness::indirect_sum(&pre, cascades)?;
        // Rotation theta = pi + angle(h_aw) - angle(sum) makes the indirect
        // sum point opposite the direct path.
        let theta = std::f64::consts::PI + h_aw.arg() - sum.arg();
        let phases = pre.rotated(theta);
        let residual = willie_power(&phases, cascades, h_aw)?;
        debug_assert!(
            residual <= TOL_REL * (z1.r + z2.r + c).powi(2),
            "candidate residual {residual} above tolerance"
        );
        let bob_power = willie_power(&phases, bob_cascades, h_ab)?;
        let bob_snr = params.tx_power() * bob_power / params.noise_var(Receiver::Bob);
        Ok((phases, residual, bob_snr))
    };

    let (phi_a, residual_a, bob_snr_a) = build(phi1_a)?;
    let (phi_b, residual_b, bob_snr_b) = build(phi1_b)?;
    Ok(Some(N2Candidates { phi_a, phi_b, residual_a, residual_b, bob_snr_a, bob_snr_b }))
}

/// Reduced problem when one cascade has zero magnitude: feasible only if
/// the other magnitude equals the target (to a relative tolerance).
fn degenerate_candidate(z1: &CascadeTerm, z2: &CascadeTerm, c: f64) -> Option<f64> {
    let r = z1.r.max(z2.r);
    let scale = r + c;
    if scale == 0.0 {
        // Both cascades and the target vanish: already solved.
        return Some(0.0);
    }
    ((r - c).abs() <= 1e-9 * scale).then_some(0.0)
}

fn infeasible_result(
    cascades: &[CascadeTerm],
    h_aw: Complex64,
    bob_cascades: &[CascadeTerm],
    h_ab: Complex64,
    params: &ChannelParams,
) -> Result<SolveResult> {
    let phases = PhaseVector::zeros(cascades.len());
    let residual = willie_power(&phases, cascades, h_aw)?;
    let bob_power = willie_power(&phases, bob_cascades, h_ab)?;
    Ok(SolveResult {
        classification: crate::solver_gd::classify_for(&phases, cascades, h_aw),
        phases,
        residual_power: residual,
        bob_snr: params.tx_power() * bob_power / params.noise_var(Receiver::Bob),
        willie_snr: params.tx_power() * residual / params.noise_var(Receiver::Willie),
        iterations: 0,
        status: SolveStatus::Infeasible,
    })
}

/// Shared helper for tests and the acceptance suite: feasibility of a
/// two-element instance per the polygon bounds.
pub fn is_feasible_n2(cascades: &[CascadeTerm], h_aw: Complex64) -> Result<bool> {
    Ok(feasibility_bounds(cascades, h_aw)?.feasible)
}
