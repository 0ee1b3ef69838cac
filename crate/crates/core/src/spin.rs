//! Collective spin states in the Dicke basis.
//!
//! `N` two-level atoms in the symmetric subspace form a spin `j = N/2`; states
//! live on the `(N+1)`-dimensional ladder `|j, m⟩`, `m = −j .. j`. Row/column
//! index `i` maps to `m = i − N/2`. Pure dephasing with an induced twist acts
//! element-wise on the density matrix:
//!
//! `ρ_{mn}(t) = e^{−i(m−n)λΦ} · e^{i(m²−n²)Θ} · e^{−(m−n)²R} · ρ_{mn}(0)`
//!
//! with `Θ = Ω(t) − χt` the effective twisting angle. Populations never change.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use statrs::function::gamma::ln_gamma;

use crate::error::Error;
use crate::noise::DephasingRecord;
use crate::Result;

/// Density matrix of `N` atoms on the symmetric (Dicke) ladder.
#[derive(Clone, Debug)]
pub struct CollectiveState {
    n_atoms: usize,
    rho: DMatrix<C64>,
}

impl CollectiveState {
    /// Coherent spin state along `+x`: binomial amplitudes
    /// `c_m = 2^{−j} √C(2j, j+m)`, computed in log space so large `N` neither
    /// overflows nor loses the far tail.
    pub fn css(n_atoms: usize) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::invalid("atom count must be at least 1"));
        }
        let dim = n_atoms + 1;
        let amps: Vec<f64> = (0..dim)
            .map(|i| {
                let ln_binom = ln_gamma(n_atoms as f64 + 1.0)
                    - ln_gamma(i as f64 + 1.0)
                    - ln_gamma((n_atoms - i) as f64 + 1.0);
                (0.5 * ln_binom - 0.5 * n_atoms as f64 * std::f64::consts::LN_2).exp()
            })
            .collect();
        let rho = DMatrix::from_fn(dim, dim, |r, c| C64::new(amps[r] * amps[c], 0.0));
        Ok(CollectiveState { n_atoms, rho })
    }

    /// Wrap an existing density matrix. Checks Hermiticity and unit trace;
    /// positivity is left to the caller (it is a test-time assertion, not a
    /// runtime gate).
    pub fn from_density_matrix(n_atoms: usize, rho: DMatrix<C64>) -> Result<Self> {
        let dim = n_atoms + 1;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} density matrix for {n_atoms} atoms, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let trace: C64 = rho.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::invalid(format!("density matrix trace is {trace}, expected 1")));
        }
        for r in 0..dim {
            for c in r..dim {
                if (rho[(r, c)] - rho[(c, r)].conj()).norm() > 1e-10 {
                    return Err(Error::invalid("density matrix is not Hermitian"));
                }
            }
        }
        Ok(CollectiveState { n_atoms, rho })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Total spin `j = N/2`.
    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    pub fn density_matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    /// `m` value of basis index `i`.
    fn m_of(&self, i: usize) -> f64 {
        i as f64 - self.j()
    }

    /// Apply the element-wise dephasing/twisting map for one record.
    /// `lambda` scales the removable modulation phase `Φ`; `chi` is the bare
    /// collisional twist entering only through `Θ = Ω − χt`.
    pub fn evolve(&self, rec: &DephasingRecord, lambda: f64, chi: f64) -> CollectiveState {
        let theta = rec.omega_twist - chi * rec.t;
        let phase_phi = lambda * rec.phi_integral;
        let dim = self.n_atoms + 1;
        let mut rho = self.rho.clone();
        for r in 0..dim {
            let m = self.m_of(r);
            for c in 0..dim {
                let n = self.m_of(c);
                let dm = m - n;
                let arg = -dm * phase_phi + (m * m - n * n) * theta;
                let damp = (-dm * dm * rec.r).exp();
                rho[(r, c)] *= C64::from_polar(damp, arg);
            }
        }
        CollectiveState { n_atoms: self.n_atoms, rho }
    }

    /// `Tr(ρ·op)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        let dim = self.n_atoms + 1;
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state is {dim}x{dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        let mut tr = C64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                tr += self.rho[(r, c)] * op[(c, r)];
            }
        }
        Ok(tr)
    }

    /// `Tr(ρ·op)` for a Hermitian `op`: the trace is assembled from manifestly
    /// real pair sums, and the leftover imaginary dust is asserted below 1e-10.
    pub fn expectation_real(&self, op: &DMatrix<C64>) -> Result<f64> {
        let dim = self.n_atoms + 1;
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state is {dim}x{dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        let mut re = 0.0;
        let mut dust = 0.0;
        for r in 0..dim {
            let d = self.rho[(r, r)] * op[(r, r)];
            re += d.re;
            dust += d.im;
            for c in (r + 1)..dim {
                let z = self.rho[(r, c)] * op[(c, r)];
                re += 2.0 * z.re;
            }
        }
        assert!(
            dust.abs() < 1e-10 * (1.0 + re.abs()),
            "imaginary residue {dust:.3e} for a supposedly Hermitian operator"
        );
        Ok(re)
    }

    /// `Tr(ρ²) ∈ [1/(N+1), 1]`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Dense collective angular-momentum operators for `N` atoms.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub jx: DMatrix<C64>,
    pub jy: DMatrix<C64>,
    pub jz: DMatrix<C64>,
}

impl CollectiveOps {
    pub fn new(n_atoms: usize) -> Self {
        let dim = n_atoms + 1;
        let j = n_atoms as f64 / 2.0;
        let mut jp = DMatrix::<C64>::zeros(dim, dim);
        let mut jz = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            let m = i as f64 - j;
            jz[(i, i)] = C64::new(m, 0.0);
            if i + 1 < dim {
                // J₊|j,m⟩ = √(j(j+1) − m(m+1)) |j,m+1⟩
                jp[(i + 1, i)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm).scale(0.5);
        let jy = (&jp - &jm) * C64::new(0.0, -0.5);
        CollectiveOps { jx, jy, jz }
    }

    pub fn dim(&self) -> usize {
        self.jz.nrows()
    }
}

/// Closed-form first and second moments of the twisted coherent state
/// `e^{iΘJ_z²} |CSS_x⟩`; everything [`crate::squeezing`] and [`crate::qfi`]
/// need in the pure (`R = 0`) case.
#[derive(Copy, Clone, Debug)]
pub struct PureMoments {
    pub jx: f64,
    pub jx2: f64,
    pub jy2: f64,
    pub jz2: f64,
    /// `⟨J₊²⟩` (real for this state).
    pub jplus_sq: f64,
    /// `⟨J₊(2J_z + 1)⟩` (purely imaginary for this state).
    pub jplus_2jz_plus_1: C64,
}

impl PureMoments {
    /// `Cov(J_y, J_z) = Im⟨J₊(2J_z+1)⟩ / 2`.
    pub fn cov_yz(&self) -> f64 {
        self.jplus_2jz_plus_1.im / 2.0
    }
}

/// Evaluate the closed-form moments at twisting angle `theta` for `N ≥ 2`.
pub fn pure_expectations_closed(n_atoms: usize, theta: f64) -> Result<PureMoments> {
    if n_atoms < 2 {
        return Err(Error::invalid("closed-form moments need at least 2 atoms"));
    }
    let n = n_atoms as f64;
    let j = n / 2.0;
    let cos_t = theta.cos();
    let cos_2t = (2.0 * theta).cos();

    let c2_pow = cos_pow(cos_2t, n_atoms - 2); // cos^{2j−2}(2Θ)
    let c1_pow = cos_pow(cos_t, n_atoms - 2); // cos^{2j−2}(Θ)

    let jx = j * c1_pow * cos_t; // cos^{2j−1}(Θ)
    let jx2 = j / 4.0 * (2.0 * j + 1.0) + j / 4.0 * (2.0 * j - 1.0) * c2_pow;
    let jy2 = j / 4.0 * (2.0 * j + 1.0) - j / 4.0 * (2.0 * j - 1.0) * c2_pow;
    let jz2 = j / 2.0;
    let jplus_sq = j * (j - 0.5) * c2_pow;
    let jplus_2jz_plus_1 = C64::new(0.0, -j * (2.0 * j - 1.0) * theta.sin() * c1_pow);

    Ok(PureMoments { jx, jx2, jy2, jz2, jplus_sq, jplus_2jz_plus_1 })
}

/// `base^k` for possibly large integer `k`, via `sign · e^{k ln|base|}` so the
/// huge exponents of the `cos^{N−2}` factors neither under- nor overflow the
/// naive power loop.
pub(crate) fn cos_pow(base: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if base == 0.0 {
        return 0.0;
    }
    let sign = if base < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * (k as f64 * base.abs().ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::DephasingRecord;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn record(r: f64, twist: f64, phi: f64, t: f64) -> DephasingRecord {
        DephasingRecord { r, omega_twist: twist, phi_integral: phi, t }
    }

    #[test]
    fn css_amplitudes_small_n() {
        let state = CollectiveState::css(2).unwrap();
        let rho = state.density_matrix();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (i, &want) in expected.iter().enumerate() {
            assert_relative_eq!(rho[(i, i)].re, want * want, max_relative = 1e-12);
        }
    }

    #[test]
    fn css_is_normalized_for_large_n() {
        for n in [2usize, 7, 100, 400, 1000] {
            let state = CollectiveState::css(n).unwrap();
            let trace: f64 = state.density_matrix().diagonal().iter().map(|z| z.re).sum();
            assert_abs_diff_eq!(trace, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn css_points_along_x() {
        for n in [2usize, 11, 60] {
            let state = CollectiveState::css(n).unwrap();
            let ops = CollectiveOps::new(n);
            let j = n as f64 / 2.0;
            assert_abs_diff_eq!(state.expectation_real(&ops.jx).unwrap(), j, epsilon = 1e-10);
            assert_abs_diff_eq!(state.expectation_real(&ops.jy).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(state.expectation_real(&ops.jz).unwrap(), 0.0, epsilon = 1e-12);
            // ⟨J_z²⟩ = j/2 = N/4
            let jz2 = &ops.jz * &ops.jz;
            assert_relative_eq!(
                state.expectation_real(&jz2).unwrap(),
                n as f64 / 4.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn operators_satisfy_su2_algebra() {
        for n in [1usize, 2, 9, 40] {
            let ops = CollectiveOps::new(n);
            let comm = &ops.jx * &ops.jy - &ops.jy * &ops.jx;
            let expect = &ops.jz * C64::new(0.0, 1.0);
            let max_dev = (comm - expect).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            assert!(max_dev < 1e-12, "[Jx,Jy] != iJz at N = {n}: {max_dev}");
        }
    }

    #[test]
    fn evolve_identity_when_record_is_zero() {
        let state = CollectiveState::css(6).unwrap();
        let out = state.evolve(&record(0.0, 0.0, 0.0, 1.0), 1.0, 0.0);
        let dev = (out.density_matrix() - state.density_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn evolve_preserves_diagonal_and_trace() {
        let state = CollectiveState::css(12).unwrap();
        let out = state.evolve(&record(0.3, 0.7, 0.4, 2.0), 1.3, 0.05);
        for i in 0..13 {
            assert_abs_diff_eq!(
                out.density_matrix()[(i, i)].re,
                state.density_matrix()[(i, i)].re,
                epsilon = 1e-15
            );
        }
        let trace: f64 = out.density_matrix().diagonal().iter().map(|z| z.re).sum();
        assert_abs_diff_eq!(trace, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn strong_dephasing_leaves_binomial_diagonal() {
        let n = 8;
        let state = CollectiveState::css(n).unwrap();
        let out = state.evolve(&record(1e3, 0.0, 0.0, 1.0), 1.0, 0.0);
        // purity of the fully dephased state is Σ|c_m|⁴
        let expected: f64 =
            state.density_matrix().diagonal().iter().map(|z| z.re * z.re).sum();
        assert_relative_eq!(out.purity(), expected, max_relative = 1e-12);
    }

    #[test]
    fn purity_bounds_and_unitary_case() {
        let n = 10;
        let state = CollectiveState::css(n).unwrap();
        assert_relative_eq!(state.purity(), 1.0, max_relative = 1e-12);
        // R = 0 evolution is unitary: purity stays 1
        let out = state.evolve(&record(0.0, 0.9, 0.2, 3.0), 1.0, 0.0);
        assert_relative_eq!(out.purity(), 1.0, max_relative = 1e-12);
        // dephasing can only lower it, never below 1/(N+1)
        let mixed = state.evolve(&record(2.0, 0.9, 0.0, 3.0), 1.0, 0.0);
        assert!(mixed.purity() < 1.0);
        assert!(mixed.purity() >= 1.0 / (n as f64 + 1.0));
    }

    #[test]
    fn casimir_identity_after_evolution() {
        let n = 14;
        let ops = CollectiveOps::new(n);
        let casimir = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz;
        let j = n as f64 / 2.0;
        let state = CollectiveState::css(n).unwrap().evolve(&record(0.2, 0.5, 0.1, 1.0), 1.0, 0.0);
        assert_relative_eq!(
            state.expectation_real(&casimir).unwrap(),
            j * (j + 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_moments_match_matrix_route() {
        let n = 20;
        let theta = 0.05;
        let ops = CollectiveOps::new(n);
        let state =
            CollectiveState::css(n).unwrap().evolve(&record(0.0, theta, 0.0, 1.0), 1.0, 0.0);
        let m = pure_expectations_closed(n, theta).unwrap();

        assert_abs_diff_eq!(state.expectation_real(&ops.jx).unwrap(), m.jx, epsilon = 1e-10);
        let jx2 = &ops.jx * &ops.jx;
        let jy2 = &ops.jy * &ops.jy;
        let jz2 = &ops.jz * &ops.jz;
        assert_abs_diff_eq!(state.expectation_real(&jx2).unwrap(), m.jx2, epsilon = 1e-10);
        assert_abs_diff_eq!(state.expectation_real(&jy2).unwrap(), m.jy2, epsilon = 1e-10);
        assert_abs_diff_eq!(state.expectation_real(&jz2).unwrap(), m.jz2, epsilon = 1e-10);

        let jp = &ops.jx + &ops.jy * C64::new(0.0, 1.0);
        let jp2 = &jp * &jp;
        let z = state.expectation(&jp2).unwrap();
        assert_abs_diff_eq!(z.re, m.jplus_sq, epsilon = 1e-10);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-10);

        let dim = n + 1;
        let ident = DMatrix::<C64>::identity(dim, dim);
        let weighted = &jp * (&ops.jz * C64::new(2.0, 0.0) + ident);
        let z = state.expectation(&weighted).unwrap();
        assert_abs_diff_eq!(z.re, m.jplus_2jz_plus_1.re, epsilon = 1e-10);
        assert_abs_diff_eq!(z.im, m.jplus_2jz_plus_1.im, epsilon = 1e-10);
    }

    #[test]
    fn closed_moments_at_zero_twist() {
        let n = 30;
        let m = pure_expectations_closed(n, 0.0).unwrap();
        let nf = n as f64;
        assert_relative_eq!(m.jx, nf / 2.0, max_relative = 1e-14);
        assert_relative_eq!(m.jx2, nf * nf / 4.0, max_relative = 1e-14);
        assert_relative_eq!(m.jy2, nf / 4.0, max_relative = 1e-13);
        assert_relative_eq!(m.jz2, nf / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn closed_moments_satisfy_casimir() {
        let n = 24;
        let j = n as f64 / 2.0;
        for theta in [0.0, 0.03, 0.4, 1.2] {
            let m = pure_expectations_closed(n, theta).unwrap();
            assert_relative_eq!(
                m.jx2 + m.jy2 + m.jz2,
                j * (j + 1.0),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn cos_pow_handles_extremes() {
        assert_eq!(cos_pow(0.5, 0), 1.0);
        assert_eq!(cos_pow(0.0, 5), 0.0);
        assert_relative_eq!(cos_pow(-0.9, 3), -0.729, max_relative = 1e-12);
        assert_relative_eq!(cos_pow(-0.9, 4), 0.6561, max_relative = 1e-12);
        // stays finite at large exponents; graceful underflow to zero
        assert!(cos_pow(0.9999, 1_000_000) > 0.0);
        assert_eq!(cos_pow(0.5, 10_000), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let state = CollectiveState::css(4).unwrap();
        let wrong = DMatrix::<C64>::identity(3, 3);
        assert!(state.expectation(&wrong).is_err());
        assert!(state.expectation_real(&wrong).is_err());
    }
}
