//! Ohmic bath and the dephasing integrals it generates.
//!
//! The bath enters through its spectral density `J(ω) = α ω e^{−ω/ω_c}` and,
//! at temperature `T`, the dressed spectrum `G(ω) = J(ω) coth(ω/2T)`. A pulse
//! sequence folds these into two numbers per evolution time:
//!
//! - the decoherence exponent `R(t) = ∫ G(ω) F_n(ω,t) dω`, and
//! - the induced twisting angle `Ω(t) = ∫ J(ω) f_n(ω,t) dω`,
//!
//! where `F_n` and `f_n` come from [`crate::pulse`]. `Ω` carries no `coth`, so
//! it is temperature independent; that asymmetry is what lets pulse sequences
//! suppress `R` while keeping `Ω`.

use crate::error::Error;
use crate::pulse::{PulseSequence, SequencePlan};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::Result;

/// Ohmic bath parameters. All quantities in cutoff units: times in `1/ω_c`,
/// frequencies and temperatures in `ω_c` (the default cutoff is 1).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    alpha: f64,
    omega_c: f64,
    temperature: f64,
}

impl NoiseSpec {
    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !(omega_c > 0.0) || !(temperature >= 0.0) {
            return Err(Error::invalid(format!(
                "bath requires alpha >= 0, omega_c > 0, temperature >= 0; got \
                 alpha = {alpha}, omega_c = {omega_c}, temperature = {temperature}"
            )));
        }
        Ok(NoiseSpec { alpha, omega_c, temperature })
    }

    /// Bath with unit cutoff.
    pub fn ohmic(alpha: f64, temperature: f64) -> Result<Self> {
        NoiseSpec::new(alpha, 1.0, temperature)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Spectral density `J(ω) = α ω e^{−ω/ω_c}`, maximal at `ω = ω_c`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::invalid(format!(
                "spectral density frequency must be non-negative, got {omega}"
            )));
        }
        Ok(self.spectral_density_raw(omega))
    }

    fn spectral_density_raw(&self, omega: f64) -> f64 {
        self.alpha * omega * (-omega / self.omega_c).exp()
    }

    /// Temperature-dressed spectrum `G(ω) = J(ω) coth(ω/2T)`.
    ///
    /// `T = 0` is its own branch (`G ≡ J`); for `T > 0` the `ω → 0` limit is
    /// the finite value `2αT`.
    pub fn interacting_spectrum(&self, omega: f64) -> f64 {
        assert!(omega >= 0.0, "frequency must be non-negative");
        if self.temperature == 0.0 {
            return self.spectral_density_raw(omega);
        }
        let beta = 1.0 / self.temperature;
        let x = 0.5 * beta * omega;
        if x < 1e-6 {
            // J(ω)·coth(x) = α e^{−ω/ω_c} (2T + β ω²/6 + ...)
            self.alpha
                * (-omega / self.omega_c).exp()
                * (2.0 * self.temperature + beta * omega * omega / 6.0)
        } else {
            self.spectral_density_raw(omega) / x.tanh()
        }
    }
}

/// The dephasing data of one `(sequence, bath, t)` point: decoherence exponent,
/// induced twisting angle, and the modulation phase integral. Immutable once
/// computed; the element-wise evolution map consumes it as-is.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DephasingRecord {
    /// Decoherence function `R(t) ≥ 0`.
    pub r: f64,
    /// Induced twisting strength `Ω(t)`.
    pub omega_twist: f64,
    /// `Φ = ∫ ε(s) ds`; zero for Uhrig and odd-count periodic sequences.
    pub phi_integral: f64,
    /// Evaluation time.
    pub t: f64,
}

impl DephasingRecord {
    /// The record of zero evolution time: nothing has happened yet.
    pub fn at_time_zero() -> Self {
        DephasingRecord { r: 0.0, omega_twist: 0.0, phi_integral: 0.0, t: 0.0 }
    }
}

/// `R(t) = ∫₀^∞ G(ω) F_n(ω,t) dω` for the given sequence.
pub fn decoherence_r(
    noise: &NoiseSpec,
    seq: &PulseSequence,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let t = seq.duration();
    let scale = t / (seq.pulse_count() as f64 + 1.0);
    let out = integrate_semi_infinite(
        |w| noise.interacting_spectrum(w) * seq.filter_raw(w),
        noise.omega_c,
        scale,
        quad,
    )
    .map_err(|e| annotate(e, "decoherence R(t)"))?;
    debug_assert!(out.value > -1e-9, "R(t) must be non-negative, got {}", out.value);
    Ok(out.value.max(0.0))
}

/// `Ω(t) = ∫₀^∞ J(ω) f_n(ω,t) dω` for the given sequence. Temperature never
/// enters.
pub fn twisting_omega(
    noise: &NoiseSpec,
    seq: &PulseSequence,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let t = seq.duration();
    let scale = t / (seq.pulse_count() as f64 + 1.0);
    let out = integrate_semi_infinite(
        |w| noise.spectral_density_raw(w) * seq.kernel_raw(w),
        noise.omega_c,
        scale,
        quad,
    )
    .map_err(|e| annotate(e, "twisting Omega(t)"))?;
    Ok(out.value)
}

/// Evaluate the full dephasing record for a sequence.
pub fn record_for_sequence(
    noise: &NoiseSpec,
    seq: &PulseSequence,
    quad: &QuadratureSpec,
) -> Result<DephasingRecord> {
    Ok(DephasingRecord {
        r: decoherence_r(noise, seq, quad)?,
        omega_twist: twisting_omega(noise, seq, quad)?,
        phi_integral: seq.phase_integral(),
        t: seq.duration(),
    })
}

/// Evaluate the dephasing record of a sequence plan at time `t` (`t = 0` gives
/// the all-zero record without touching the quadrature).
pub fn dephasing_record(
    noise: &NoiseSpec,
    plan: &SequencePlan,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<DephasingRecord> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("evolution time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(DephasingRecord::at_time_zero());
    }
    record_for_sequence(noise, &plan.realize(t)?, quad)
}

/// Closed form of the free-evolution twisting angle,
/// `Ω(t) = α[ω_c t − arctan(ω_c t)]`.
pub fn free_twist_closed(noise: &NoiseSpec, t: f64) -> f64 {
    assert!(t >= 0.0, "time must be non-negative");
    let x = noise.omega_c * t;
    noise.alpha * (x - x.atan())
}

/// Closed form of the free-evolution decoherence function,
/// `R(t) = α{ ½ ln(1 + ω_c²t²) + ln[(β/πt) sinh(πt/β)] }`,
/// with only the vacuum (first) term at `T = 0`.
///
/// The thermal term is exact only for `ω_c ≫ T`; outside that regime use the
/// quadrature route.
pub fn free_decoherence_closed(noise: &NoiseSpec, t: f64) -> f64 {
    assert!(t >= 0.0, "time must be non-negative");
    if t == 0.0 {
        return 0.0;
    }
    let x = noise.omega_c * t;
    let vacuum = 0.5 * (1.0 + x * x).ln();
    let thermal = if noise.temperature == 0.0 {
        0.0
    } else {
        log_sinh_ratio(std::f64::consts::PI * t * noise.temperature)
    };
    noise.alpha * (vacuum + thermal)
}

/// `ln(sinh(x)/x)` without overflow at large `x` or cancellation at small `x`.
fn log_sinh_ratio(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x > 20.0 {
        x - (2.0 * x).ln() + (-(2.0 * x)).exp().ln_1p()
    } else {
        (x.sinh() / x).ln()
    }
}

fn annotate(err: Error, what: &str) -> Error {
    match err {
        Error::NumericFailure { context, value, achieved_error } => Error::NumericFailure {
            context: format!("{what}: {context}"),
            value,
            achieved_error,
        },
        other => other,
    }
}
