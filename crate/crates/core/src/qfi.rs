//! Quantum Fisher information for SU(2) rotations.
//!
//! For a rotation `ρ(θ) = e^{−iθJ_n} ρ e^{iθJ_n}` the QFI is the quadratic form
//! `F = n·C·nᵀ` of a real symmetric 3×3 matrix `C`; the best axis gives
//! `F_max = λ_max(C)`. Over the spectral decomposition `ρ = Σ p_i |i⟩⟨i|`:
//!
//! `C_kl = Σ_{i≠j} (p_i−p_j)²/(p_i+p_j) · 2 Re(⟨i|J_k|j⟩⟨j|J_l|i⟩)`
//!
//! which for a pure state collapses to four times the covariance matrix,
//! `C_kl = 2⟨J_kJ_l + J_lJ_k⟩ − 4⟨J_k⟩⟨J_l⟩`. The amplification rate
//! `η = F_max/N` measures the gain over the coherent-state baseline `F = N`.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::spin::{cos_pow, pure_expectations_closed, CollectiveOps, CollectiveState};
use crate::Result;

/// Eigenvalue pairs whose sum is below this are outside the support of ρ and
/// contribute nothing; pairs closer than this are degenerate and contribute
/// zero weight.
const EIGEN_PAIR_FLOOR: f64 = 1e-14;

/// Maximal QFI data for one state.
#[derive(Clone, Debug)]
pub struct QfiResult {
    /// `F_max = λ_max(C)`.
    pub f_max: f64,
    /// Amplification rate `η = F_max / N`.
    pub eta: f64,
    /// The symmetric matrix `C` behind the quadratic form.
    pub c_matrix: Matrix3<f64>,
    /// Rotation axis achieving `F_max` (unit vector).
    pub optimal_axis: Vector3<f64>,
}

/// `C` for an arbitrary (generally mixed) state, through the eigendecomposition
/// of ρ.
pub fn c_matrix_mixed(state: &CollectiveState, ops: &CollectiveOps) -> Result<Matrix3<f64>> {
    let dim = state.n_atoms() + 1;
    if ops.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operators are {}-dimensional, state is {dim}-dimensional",
            ops.dim()
        )));
    }
    let eig = SymmetricEigen::new(state.density_matrix().clone());
    let p = &eig.eigenvalues;
    let v = &eig.eigenvectors;

    // rotate the three operators into the eigenbasis of ρ
    let vh = v.adjoint();
    let w: [DMatrix<C64>; 3] =
        [&vh * &ops.jx * v, &vh * &ops.jy * v, &vh * &ops.jz * v];

    let mut c = Matrix3::<f64>::zeros();
    for i in 0..dim {
        for jdx in (i + 1)..dim {
            let sum = p[i] + p[jdx];
            let diff = p[i] - p[jdx];
            if sum < EIGEN_PAIR_FLOOR || diff.abs() < EIGEN_PAIR_FLOOR {
                continue;
            }
            let weight = diff * diff / sum;
            for k in 0..3 {
                for l in k..3 {
                    // (i,j) and (j,i) contribute equally; fold the factor 2 in
                    let term = 4.0 * weight * (w[k][(i, jdx)] * w[l][(i, jdx)].conj()).re;
                    c[(k, l)] += term;
                }
            }
        }
    }
    for k in 0..3 {
        for l in 0..k {
            c[(k, l)] = c[(l, k)];
        }
    }
    Ok(c)
}

/// `C = 4·Cov(J)` for a pure state. Rejects states with purity below
/// `1 − 1e−10`.
pub fn c_matrix_pure(state: &CollectiveState, ops: &CollectiveOps) -> Result<Matrix3<f64>> {
    let purity = state.purity();
    if purity <= 1.0 - 1e-10 {
        return Err(Error::NotPure(purity));
    }
    let js = [&ops.jx, &ops.jy, &ops.jz];
    let mut means = [0.0; 3];
    for (k, jk) in js.iter().enumerate() {
        means[k] = state.expectation_real(jk)?;
    }
    let mut c = Matrix3::<f64>::zeros();
    for k in 0..3 {
        for l in k..3 {
            let anti = js[k].clone() * js[l] + js[l].clone() * js[k];
            let val = 2.0 * state.expectation_real(&anti)? - 4.0 * means[k] * means[l];
            c[(k, l)] = val;
            c[(l, k)] = val;
        }
    }
    Ok(c)
}

/// Largest eigenvalue and axis of a symmetric `C`, by the closed-form
/// trigonometric solution of the 3×3 characteristic cubic.
pub fn qfi_max(c: &Matrix3<f64>, n_atoms: usize) -> QfiResult {
    let (f_max, axis) = sym3_max_eigen(c);
    QfiResult { f_max, eta: f_max / n_atoms as f64, c_matrix: *c, optimal_axis: axis }
}

/// Closed-form maximal QFI of the twisted pure state, `F_max = N·η(N,Θ)` with
///
/// `η = max{ 1 + (N−1)/4 (A₋ + √(A₋² + B²)),  1 + (N−1)/2 A₊ − N cos^{2N−2}Θ }`
///
/// where `A_± = 1 ± cos^{N−2}(2Θ)` and `B = −4 sin Θ cos^{N−2} Θ`. The first
/// branch is the transverse (y–z) covariance block, the second the `(ΔJ_x)²`
/// entry; at `Θ = 0` both collapse to the coherent-state value `F = N`.
pub fn qfi_pure_closed(n_atoms: usize, theta: f64) -> Result<QfiResult> {
    if n_atoms < 2 {
        return Err(Error::invalid("closed-form QFI needs at least 2 atoms"));
    }
    let n = n_atoms as f64;
    let c2 = cos_pow((2.0 * theta).cos(), n_atoms - 2);
    let c1 = cos_pow(theta.cos(), n_atoms - 2);
    let a_minus = 1.0 - c2;
    let a_plus = 1.0 + c2;
    let b = -4.0 * theta.sin() * c1;

    let branch_yz = 1.0 + (n - 1.0) / 4.0 * (a_minus + a_minus.hypot(b));
    let branch_x = 1.0 + (n - 1.0) / 2.0 * a_plus - n * c1 * c1 * theta.cos() * theta.cos();
    let eta = branch_yz.max(branch_x);

    // assemble the block-structured C of this state for the axis and matrix
    let m = pure_expectations_closed(n_atoms, theta)?;
    let var_x = m.jx2 - m.jx * m.jx;
    let cov_yz = m.cov_yz();
    let c = Matrix3::new(
        4.0 * var_x, 0.0, 0.0,
        0.0, 4.0 * m.jy2, 4.0 * cov_yz,
        0.0, 4.0 * cov_yz, 4.0 * m.jz2,
    );
    let (_, axis) = sym3_max_eigen(&c);
    Ok(QfiResult { f_max: n * eta, eta, c_matrix: c, optimal_axis: axis })
}

/// Quantum Cramér–Rao bound `Δθ = 1/√(N_m F)` for `N_m` measurements.
pub fn qcr_bound(f: f64, n_measurements: u64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::invalid(format!("QFI must be positive, got {f}")));
    }
    if n_measurements < 1 {
        return Err(Error::invalid("measurement count must be at least 1"));
    }
    Ok(1.0 / (n_measurements as f64 * f).sqrt())
}

/// Closed-form eigensolve of a real symmetric 3×3 matrix: largest eigenvalue
/// and a unit eigenvector.
fn sym3_max_eigen(c: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let scale = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return (0.0, Vector3::new(1.0, 0.0, 0.0));
    }
    let off = c[(0, 1)] * c[(0, 1)] + c[(0, 2)] * c[(0, 2)] + c[(1, 2)] * c[(1, 2)];
    if off < (1e-15 * scale) * (1e-15 * scale) {
        // effectively diagonal
        let mut best = 0;
        for k in 1..3 {
            if c[(k, k)] > c[(best, best)] {
                best = k;
            }
        }
        let mut axis = Vector3::zeros();
        axis[best] = 1.0;
        return (c[(best, best)], axis);
    }

    let q = c.trace() / 3.0;
    let p2 = (c[(0, 0)] - q).powi(2)
        + (c[(1, 1)] - q).powi(2)
        + (c[(2, 2)] - q).powi(2)
        + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    let b = (c - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;

    let lam_max = q + 2.0 * p * phi.cos();
    let lam_min = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos();
    let lam_mid = 3.0 * q - lam_max - lam_min;

    // columns of (C − λ_mid)(C − λ_min) span the λ_max eigenspace
    let m = (c - Matrix3::identity() * lam_mid) * (c - Matrix3::identity() * lam_min);
    let axis = dominant_column(&m)
        .or_else(|| dominant_column(&(c - Matrix3::identity() * lam_min)))
        .unwrap_or_else(|| Vector3::new(1.0, 0.0, 0.0));
    (lam_max, axis)
}

fn dominant_column(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let mut best: Option<Vector3<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..3 {
        let col = m.column(k).into_owned();
        let norm = col.norm();
        if norm > best_norm {
            best_norm = norm;
            best = Some(col / norm);
        }
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if best_norm > 1e-12 * (1.0 + scale) {
        best
    } else {
        None
    }
}
