//! Covert communication through a reflective panel.
//!
//! Alice talks to Bob while a warden, Willie, listens on a channel of his
//! own.  Every element of the reflective panel adds a controllable phase to
//! the signal it bounces toward Willie; when the reflected sum cancels the
//! direct leakage exactly, Willie's received distribution is identical with
//! and without a transmission and no detector can beat a coin flip.
//!
//! The crate provides the pieces needed to study that regime numerically:
//!
//! * [`channel`] — cascade channel model, sampling, densities.
//! * [`covertness`] — received power, SNR, KL divergence, feasibility bounds.
//! * [`solver_n2`] — closed-form two-element solver.
//! * [`solver_gd`] — projected gradient descent, critical-point analysis,
//!   and the constructive (bisection) phase builder.
//! * [`probability`] — probability that perfect cancellation is feasible,
//!   both analytic (two elements) and Monte Carlo (any size).

pub mod channel;
pub mod covertness;
mod error;
pub mod probability;
pub mod quad;
pub mod solve;
pub mod solver_gd;
pub mod solver_n2;
pub mod special;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
