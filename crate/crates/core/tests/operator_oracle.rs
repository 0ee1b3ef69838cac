//! The element-wise evolution map against an operator-level construction:
//! explicit matrix exponentials for the twist and modulation phase, and a
//! Gaussian mixture of z rotations for the dephasing channel.

mod common;

use dd_metrology::noise::DephasingRecord;
use dd_metrology::spin::{CollectiveOps, CollectiveState};

fn check(n: usize, r: f64, theta: f64, phi: f64, tol: f64) {
    let css = CollectiveState::css(n).unwrap();
    let rec = DephasingRecord { r, omega_twist: theta, phi_integral: phi, t: 1.0 };
    let fast = css.evolve(&rec, 1.0, 0.0);

    let ops = CollectiveOps::new(n);
    let oracle = common::evolve_operator_oracle(css.density_matrix(), &ops.jz, r, theta, phi);
    let dev = common::max_abs_diff(fast.density_matrix(), &oracle);
    assert!(
        dev < tol,
        "N = {n}, r = {r}, theta = {theta}, phi = {phi}: deviation {dev:.3e}"
    );
}

#[test]
fn three_level_case_matches_matrix_exponentials() {
    check(2, 0.1, 0.3, 0.0, 1e-10);
}

#[test]
fn larger_ladder_with_modulation_phase() {
    check(6, 0.25, 0.7, 0.9, 1e-10);
    check(9, 0.05, -0.4, -1.3, 1e-10);
}

#[test]
fn pure_twist_without_dephasing() {
    check(5, 0.0, 1.1, 0.2, 1e-11);
}

#[test]
fn strong_dephasing_limit() {
    // far into the dephased regime the mixture of rotations must reproduce
    // the same nearly diagonal state
    check(4, 3.0, 0.2, 0.0, 1e-9);
}
