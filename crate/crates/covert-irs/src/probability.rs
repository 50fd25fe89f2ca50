//! Probability that a perfect-covertness configuration exists.
//!
//! Feasibility is the polygon condition `min <= |h_aw| <= max` from the
//! cascade magnitudes.  For two elements that event is
//! `|X1 - X2| <= Y <= X1 + X2` with `X_i` double-Rayleigh and `Y`
//! Rayleigh, and the probability reduces to a two-dimensional integral
//! once the innermost variable is absorbed into the double-Rayleigh CDF:
//!
//! `P = int f_Y(y) int f_X2(x2) [F_X1(x2 + y) - F_X1(|x2 - y|)] dx2 dy`.
//!
//! This is the unordered form of the total-probability decomposition; it
//! stays exact when the two cascade scales differ, where the
//! exchangeability shortcut (factor 2 with `max(x2, y - x2)`) does not.
//! For general N the module falls back to Monte Carlo over per-trial RNG
//! streams, so estimates do not depend on execution order or thread
//! count.

use std::cell::Cell;

use rayon::prelude::*;

use crate::channel::{
    double_rayleigh_cdf, double_rayleigh_pdf, rayleigh_pdf, sample_realization_stream,
    ChannelParams, ChannelRealization, Receiver,
};
use crate::covertness::feasibility_bounds;
use crate::{Error, Result};

/// Mass threshold for truncating the outer integrals; the tail beyond
/// each cut carries less than this fraction of the distribution.
const TAIL_MASS: f64 = 1e-12;

/// How an estimate was produced, with its accuracy knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateMethod {
    AnalyticQuadrature { tolerance: f64 },
    MonteCarlo { n_trials: u64 },
}

/// A probability in [0, 1] with its uncertainty: binomial standard error
/// for Monte Carlo, zero for quadrature (accuracy lives in the tolerance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

/// Sample moments of the feasibility interval endpoints and the direct
/// magnitude: `min`/`max` of `|sum z e^{j phi}|` over phases, and
/// `|h_aw|`, across sampled realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsStatistics {
    pub n_elements: usize,
    pub mean_min: f64,
    pub std_min: f64,
    pub mean_max: f64,
    pub std_max: f64,
    pub mean_direct: f64,
    pub std_direct: f64,
}

/// Upper integration cut for a double-Rayleigh variable with unit
/// effective scale: `u` with survival `u K1(u) = TAIL_MASS`.
fn double_rayleigh_tail_cut() -> f64 {
    // Survival is strictly decreasing; bracket [1, 60] straddles 1e-12.
    let surv = |u: f64| u * crate::special::bessel_k1(u);
    let (mut lo, mut hi) = (1.0, 60.0);
    debug_assert!(surv(lo) > TAIL_MASS && surv(hi) < TAIL_MASS);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if surv(mid) > TAIL_MASS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability that `|X1 - X2| <= Y <= X1 + X2` for
/// double-Rayleigh `X_i` (effective scale `sigma_xi`, i.e. the product of
/// the two underlying Rayleigh scales) and Rayleigh `Y`.
///
/// Adaptive Gauss-Kronrod in both dimensions; the inner integral splits
/// at its kink `x2 = y`.  The reported tolerance covers the combined
/// outer and inner error estimates; if the quadrature cannot certify
/// `quad_tol`, the call fails with the achieved estimate.
pub fn existence_probability_n2_analytic(
    sigma_x1: f64,
    sigma_x2: f64,
    sigma_y: f64,
    quad_tol: f64,
) -> Result<ProbabilityEstimate> {
    for (name, v) in [
        ("sigma_x1", sigma_x1),
        ("sigma_x2", sigma_x2),
        ("sigma_y", sigma_y),
        ("quad_tol", quad_tol),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
        }
    }

    let u_cut = double_rayleigh_tail_cut();
    let x2_max = u_cut * sigma_x2;
    // Rayleigh quantile: 1 - exp(-y^2 / 2 sigma^2) = 1 - TAIL_MASS.
    let y_max = sigma_y * (-2.0 * TAIL_MASS.ln()).sqrt();

    let inner_tol = quad_tol / 16.0;
    let max_inner_error = Cell::new(0.0f64);

    // Quadrature nodes stay inside [a, b], so every density argument is
    // nonnegative and the Result-returning densities cannot fail here.
    let inner = |y: f64| -> f64 {
        let weighted = |x2: f64| {
            double_rayleigh_pdf(x2, sigma_x2, 1.0).expect("x2 >= 0")
                * (double_rayleigh_cdf(x2 + y, sigma_x1, 1.0).expect("arg >= 0")
                    - double_rayleigh_cdf((x2 - y).abs(), sigma_x1, 1.0).expect("arg >= 0"))
        };
        // |x2 - y| kinks the integrand at x2 = y.
        let split = y.min(x2_max);
        let lo = crate::quad::integrate(&weighted, 0.0, split, inner_tol);
        let hi = crate::quad::integrate(&weighted, split, x2_max, inner_tol);
        let err = lo.error_estimate + hi.error_estimate;
        if err > max_inner_error.get() {
            max_inner_error.set(err);
        }
        lo.value + hi.value
    };

    let outer = |y: f64| {
        let fy = rayleigh_pdf(y, sigma_y).expect("y >= 0");
        if fy == 0.0 {
            return 0.0;
        }
        fy * inner(y)
    };
    let result = crate::quad::integrate(&outer, 0.0, y_max, quad_tol / 4.0);

    // Inner errors perturb the outer integrand by at most the worst inner
    // estimate times f_Y, and f_Y integrates to at most 1.
    let achieved = result.error_estimate + max_inner_error.get();
    if achieved > quad_tol {
        return Err(Error::ToleranceNotReached { requested: quad_tol, achieved });
    }
    Ok(ProbabilityEstimate {
        value: result.value.clamp(0.0, 1.0),
        std_error: 0.0,
        method: EstimateMethod::AnalyticQuadrature { tolerance: achieved },
    })
}

/// Monte-Carlo feasibility frequency over `n_trials` independent
/// realizations drawn from per-trial streams of `params`' seed.
pub fn existence_probability_mc(
    params: &ChannelParams,
    n_trials: u64,
) -> Result<ProbabilityEstimate> {
    existence_probability_mc_with(params, n_trials, sample_realization_stream)
}

/// [`existence_probability_mc`] with an injectable sampler — the test
/// hook for deterministic channels.
pub fn existence_probability_mc_with(
    params: &ChannelParams,
    n_trials: u64,
    sampler: impl Fn(&ChannelParams, u64) -> ChannelRealization + Sync,
) -> Result<ProbabilityEstimate> {
    if n_trials == 0 {
        return Err(Error::InvalidParams("n_trials must be at least 1".into()));
    }
    // Integer reduction keeps the result independent of thread count.
    let feasible: u64 = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let re = sampler(params, trial);
            let cascades = crate::channel::cascade_terms(&re, Receiver::Willie);
            let bounds = feasibility_bounds(&cascades, re.h_aw)
                .expect("n_elements >= 1 by ChannelParams invariant");
            u64::from(bounds.feasible)
        })
        .sum();
    let p = feasible as f64 / n_trials as f64;
    Ok(ProbabilityEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n_trials as f64).sqrt(),
        method: EstimateMethod::MonteCarlo { n_trials },
    })
}

/// Sample means and standard deviations (denominator `n - 1`) of the
/// polygon bounds and the direct magnitude over `n_trials` realizations.
pub fn bounds_statistics(params: &ChannelParams, n_trials: u64) -> Result<BoundsStatistics> {
    if n_trials < 2 {
        return Err(Error::InvalidParams(format!(
            "n_trials must be at least 2 for sample standard deviations, got {n_trials}"
        )));
    }
    // Collect in stream order, then reduce sequentially: bitwise
    // reproducible regardless of worker count.
    let rows: Vec<[f64; 3]> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let re = sample_realization_stream(params, trial);
            let cascades = crate::channel::cascade_terms(&re, Receiver::Willie);
            let bounds = feasibility_bounds(&cascades, re.h_aw)
                .expect("n_elements >= 1 by ChannelParams invariant");
            [bounds.min_mag, bounds.max_mag, bounds.direct_mag]
        })
        .collect();

    let stats = |ix: usize| {
        let n = rows.len() as f64;
        let mean = rows.iter().map(|r| r[ix]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[ix] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    };
    let (mean_min, std_min) = stats(0);
    let (mean_max, std_max) = stats(1);
    let (mean_direct, std_direct) = stats(2);
    Ok(BoundsStatistics {
        n_elements: params.n_elements(),
        mean_min,
        std_min,
        mean_max,
        std_max,
        mean_direct,
        std_direct,
    })
}
