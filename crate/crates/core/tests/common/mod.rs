//! Independent oracles for the acceptance suite.
//!
//! Nothing here shares code with the library's evaluation paths: the kernel
//! oracle integrates the defining double integral by composite Simpson on
//! pulse-aligned panels, and the evolution oracle drives the density matrix
//! through explicit matrix exponentials and a Gaussian mixture of rotations.

use dd_metrology::pulse::PulseSequence;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Simpson rule over `[a, b]` with `m` (even) subintervals.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, m: usize) -> f64 {
    let m = m + m % 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

fn edges_of(seq: &PulseSequence) -> Vec<f64> {
    let mut edges = Vec::with_capacity(seq.times().len() + 2);
    edges.push(0.0);
    edges.extend_from_slice(seq.times());
    edges.push(seq.duration());
    edges
}

/// Brute-force evaluation of `∫₀ᵗ ds ∫₀ˢ ds' ε(s) ε(s') sin ω(s−s')` by
/// nested quadrature on pulse-aligned cells. The sign of ε is constant on
/// each open cell, so it multiplies the cell integral rather than being
/// sampled at the discontinuities; the `sin` factor itself is never
/// rearranged.
pub fn kernel_double_quadrature(seq: &PulseSequence, omega: f64) -> f64 {
    let edges = edges_of(seq);
    let per_cell = 240;
    let sign = |cell: usize| if cell % 2 == 0 { 1.0 } else { -1.0 };

    let mut total = 0.0;
    for a in 0..edges.len() - 1 {
        let outer = |s: f64| {
            let mut inner = 0.0;
            for b in 0..a {
                inner += sign(b)
                    * simpson(&|sp: f64| (omega * (s - sp)).sin(), edges[b], edges[b + 1], per_cell);
            }
            inner += sign(a) * simpson(&|sp: f64| (omega * (s - sp)).sin(), edges[a], s, per_cell);
            sign(a) * inner
        };
        total += simpson(&outer, edges[a], edges[a + 1], per_cell);
    }
    total
}

/// Matrix exponential by scaling and squaring with a Taylor series; generic,
/// no knowledge of the operator's structure.
pub fn matrix_exp(a: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = a.nrows();
    let norm = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max) * dim as f64;
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = a / C64::new(2f64.powi(squarings as i32), 0.0);

    let mut result = DMatrix::<C64>::identity(dim, dim);
    let mut term = DMatrix::<C64>::identity(dim, dim);
    for k in 1..=24 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Operator-level oracle for the dephasing/twisting map: the twist and the
/// modulation phase are applied as matrix exponentials, and dephasing as a
/// Gaussian mixture of z rotations with variance `2r` (integrated by Simpson
/// over ±8 standard deviations).
pub fn evolve_operator_oracle(
    rho0: &DMatrix<C64>,
    jz: &DMatrix<C64>,
    r: f64,
    theta: f64,
    lambda_phi: f64,
) -> DMatrix<C64> {
    let jz2 = jz * jz;
    let twist = matrix_exp(&(&jz2 * C64::new(0.0, theta)));
    let phase = matrix_exp(&(jz * C64::new(0.0, -lambda_phi)));
    let u = &twist * &phase;
    let rotated = &u * rho0 * u.adjoint();

    if r == 0.0 {
        return rotated;
    }
    let sigma = (2.0 * r).sqrt();
    let span = 8.0 * sigma;
    let m = 1600usize;
    let h = 2.0 * span / m as f64;
    let dim = rho0.nrows();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
    for k in 0..=m {
        let phi = -span + h * k as f64;
        let w = if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let weight = w * h / 3.0 * norm * (-phi * phi / (2.0 * sigma * sigma)).exp();
        let kick = matrix_exp(&(jz * C64::new(0.0, -phi)));
        acc += (&kick * &rotated * kick.adjoint()).scale(weight);
    }
    acc
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
