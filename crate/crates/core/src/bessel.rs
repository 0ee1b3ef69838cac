//! Integer-order Bessel functions of the first kind.
//!
//! Downward (Miller) recurrence from a start order comfortably above both the
//! requested order and the argument, normalized with the identity
//! `J_0(x) + 2 Σ_k J_{2k}(x) = 1`. Downward recurrence is stable for every
//! argument, so a single code path covers the whole (order, argument) range
//! used by the Uhrig filter approximation.

/// `J_n(x)` for integer `n ≥ 0` and `x ≥ 0`.
pub(crate) fn bessel_jn(n: usize, x: f64) -> f64 {
    assert!(x >= 0.0, "argument must be non-negative");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Start high enough that the recurrence has converged onto the minimal
    // solution by the time it reaches order n; the pad must track whichever
    // of order and argument is larger.
    let reach = n.max(x.ceil() as usize).max(1) as f64;
    let top = (reach + 20.0 + 3.0 * reach.sqrt()) as usize;
    let start = top + (top % 2); // even start keeps the normalization sum aligned

    let mut j_up = 0.0f64; // J_{k+1}
    let mut j_cur = 1e-30f64; // J_k, arbitrary seed fixed by normalization
    let mut norm = 0.0f64;
    let mut result = if n == start { j_cur } else { 0.0 };

    let mut k = start;
    while k > 0 {
        let j_down = 2.0 * k as f64 / x * j_cur - j_up;
        j_up = j_cur;
        j_cur = j_down;
        k -= 1;

        if k % 2 == 0 && k > 0 {
            norm += j_cur;
        }
        if k == n {
            result = j_cur;
        }

        // rescale before anything overflows; relative structure is preserved
        if j_cur.abs() > 1e100 {
            j_cur *= 1e-100;
            j_up *= 1e-100;
            norm *= 1e-100;
            result *= 1e-100;
        }
    }
    norm = 2.0 * norm + j_cur; // j_cur now holds J_0
    result / norm
}
