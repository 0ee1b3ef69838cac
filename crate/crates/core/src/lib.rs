//! Collective-spin metrology under dynamical decoupling.
//!
//! This crate simulates an ensemble of `N` two-level atoms (a collective spin
//! `j = N/2`) that dephases through an ohmic bath while a sequence of instantaneous
//! π pulses modulates the system–bath coupling. The bath does two things at once:
//! it scrambles coherences at a rate set by the decoherence function `R(t)`, and it
//! induces an effective one-axis-twisting interaction of strength `Ω(t)`. Pulse
//! sequences filter the first effect without removing the second, so a dephasing
//! bath can be turned into a resource for spin squeezing and phase estimation.
//!
//! The main pieces:
//!
//! - [`pulse`] — π-pulse sequences (periodic, Uhrig, custom), their modulation
//!   function, spectral filter function, and twisting kernel.
//! - [`quadrature`] — adaptive Gauss–Kronrod integration over `(0, ∞)` for
//!   oscillatory, exponentially damped integrands.
//! - [`noise`] — the ohmic bath, its temperature-dressed spectrum, and the
//!   integrals `R(t)` and `Ω(t)`.
//! - [`spin`] — Dicke-basis density matrices, collective operators, the
//!   element-wise dephasing/twisting evolution map, and closed-form moments.
//! - [`squeezing`] — the Kitagawa–Ueda squeezing parameter, by covariance
//!   minimization on a state or from the analytic dephasing formula.
//! - [`qfi`] — quantum Fisher information for SU(2) rotations: mixed-state and
//!   pure-state routes plus the pure-state closed form.
//! - [`experiments`] — config-driven parameter sweeps and named presets
//!   producing tabular datasets.
//! - [`cli`] — the `figure` / `sweep` / `check` command-line front end.
//!
//! Units are natural: the bath cutoff `ω_c` sets the scale, times are in
//! `1/ω_c`, frequencies and temperatures in `ω_c`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod pulse;
pub mod qfi;
pub mod quadrature;
pub mod spin;
pub mod squeezing;

mod bessel;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
