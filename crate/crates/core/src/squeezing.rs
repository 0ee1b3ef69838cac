//! Kitagawa–Ueda spin squeezing.
//!
//! `ξ² = 2(ΔJ_⊥)²_min / j`, the smallest variance over directions perpendicular
//! to the mean spin, in units of the coherent-state value. Two routes:
//!
//! - [`squeezing_numeric`] works on any density matrix: mean-spin frame,
//!   2×2 transverse covariance matrix, smallest eigenvalue.
//! - [`squeezing_analytic`] evaluates the closed dephasing-model form
//!   `ξ² = 1 + (2j−1)/4 · (A − √(A²+B²))` with
//!   `A = 1 − cos^{2j−2}(2Θ) e^{−4R}` and `B = −4 sin Θ cos^{2j−2}(Θ) e^{−R}`.
//!
//! For states produced by [`CollectiveState::evolve`] the two agree to
//! near machine precision; that pair is one of the crate's standing
//! self-checks.

use crate::error::Error;
use crate::noise::DephasingRecord;
use crate::spin::{cos_pow, CollectiveOps, CollectiveState};
use crate::Result;

/// A squeezing value and the quadrature angle that attains it.
#[derive(Copy, Clone, Debug)]
pub struct SqueezingResult {
    /// Squeezing parameter `ξ² > 0`; below 1 means squeezed.
    pub xi2: f64,
    /// Optimal quadrature angle in `[0, π)`, measured from the first
    /// transverse frame axis (the `y` axis when the mean spin is along `x`).
    pub psi_opt: f64,
}

/// Closed-form squeezing for the dephasing model at twist `Θ` and exponent `R`.
pub fn squeezing_from_parts(n_atoms: usize, theta: f64, r: f64) -> Result<SqueezingResult> {
    if n_atoms < 2 {
        return Err(Error::invalid("squeezing needs at least 2 atoms"));
    }
    if r < 0.0 {
        return Err(Error::invalid(format!("decoherence exponent must be >= 0, got {r}")));
    }
    let two_j = n_atoms as f64;
    let c2 = cos_pow((2.0 * theta).cos(), n_atoms - 2);
    let c1 = cos_pow(theta.cos(), n_atoms - 2);
    let a = 1.0 - c2 * (-4.0 * r).exp();
    let b = -4.0 * theta.sin() * c1 * (-r).exp();
    let xi2 = 1.0 + (two_j - 1.0) / 4.0 * (a - a.hypot(b));
    let psi_opt = normalize_angle((std::f64::consts::PI + b.atan2(a)) / 2.0);
    Ok(SqueezingResult { xi2, psi_opt })
}

/// Closed-form squeezing from a dephasing record (`Θ = Ω(t)`, no collisional
/// twist).
pub fn squeezing_analytic(n_atoms: usize, rec: &DephasingRecord) -> Result<SqueezingResult> {
    squeezing_from_parts(n_atoms, rec.omega_twist, rec.r)
}

/// Squeezing of an arbitrary state by transverse covariance minimization.
///
/// Fails with [`Error::DegenerateDirection`] when the mean spin vanishes and
/// no transverse plane exists.
pub fn squeezing_numeric(state: &CollectiveState, ops: &CollectiveOps) -> Result<SqueezingResult> {
    let mean = [
        state.expectation_real(&ops.jx)?,
        state.expectation_real(&ops.jy)?,
        state.expectation_real(&ops.jz)?,
    ];
    let norm = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt();
    if norm < 1e-10 {
        return Err(Error::DegenerateDirection(norm));
    }
    let dir = [mean[0] / norm, mean[1] / norm, mean[2] / norm];

    // transverse frame: v1 = ẑ × n̂ (→ ŷ for a +x mean spin), v2 = n̂ × v1
    let mut v1 = [-dir[1], dir[0], 0.0];
    let v1_norm = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
    if v1_norm < 1e-12 {
        // mean spin along ±z; any transverse pair works, use x
        v1 = [1.0, 0.0, 0.0];
    } else {
        v1 = [v1[0] / v1_norm, v1[1] / v1_norm, 0.0];
    }
    let v2 = [
        dir[1] * v1[2] - dir[2] * v1[1],
        dir[2] * v1[0] - dir[0] * v1[2],
        dir[0] * v1[1] - dir[1] * v1[0],
    ];

    let combine = |v: [f64; 3]| {
        &ops.jx * num_complex::Complex64::new(v[0], 0.0)
            + &ops.jy * num_complex::Complex64::new(v[1], 0.0)
            + &ops.jz * num_complex::Complex64::new(v[2], 0.0)
    };
    let ja = combine(v1);
    let jb = combine(v2);

    // both transverse means vanish exactly, so these are plain second moments
    let vaa = state.expectation_real(&(&ja * &ja))?;
    let vbb = state.expectation_real(&(&jb * &jb))?;
    let vab = state.expectation_real(&(&ja * &jb + &jb * &ja))? / 2.0;

    let half_sum = 0.5 * (vaa + vbb);
    let half_diff = 0.5 * (vaa - vbb);
    let lambda_min = half_sum - half_diff.hypot(vab);
    let xi2 = 2.0 * lambda_min / state.j();

    // variance along cos ψ v1 + sin ψ v2 is minimized at
    // 2ψ = π + atan2(2V12, V11 − V22)
    let psi_opt =
        normalize_angle((std::f64::consts::PI + (2.0 * vab).atan2(2.0 * half_diff)) / 2.0);
    Ok(SqueezingResult { xi2, psi_opt })
}

/// Short-time / large-`N` optimum of one-axis twisting:
/// `ξ²_min = (3/4j)(2j/3)^{1/3} ≈ N^{−2/3}`.
pub fn squeezing_limit(n_atoms: usize) -> f64 {
    assert!(n_atoms >= 2, "limit needs at least 2 atoms");
    let j = n_atoms as f64 / 2.0;
    3.0 / (4.0 * j) * (2.0 * j / 3.0).powf(1.0 / 3.0)
}

/// Minimize a smooth single-dip function on `[lo, hi]`: coarse grid of
/// `grid_points`, then golden-section refinement on the bracketing interval.
/// Returns `(argmin, min)`.
pub fn minimize_scalar<F>(f: F, lo: f64, hi: f64, grid_points: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(hi > lo && grid_points >= 3);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..grid_points {
        let x = lo + step * k as f64;
        let v = f(x);
        if v < best_val {
            best_val = v;
            best_idx = k;
        }
    }
    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_idx + 1) as f64).min(hi);

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if (b - a).abs() < 1e-10 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn normalize_angle(psi: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut out = psi.rem_euclid(pi);
    if out >= pi {
        out -= pi;
    }
    out
}
