//! Semi-infinite quadrature for oscillatory, exponentially damped integrands.
//!
//! The bath overlap integrals have the shape `∫₀^∞ g(ω) dω` where `g` decays
//! like `e^{−ω/ω_c}` but oscillates on a frequency scale set by the pulse
//! sequence. The domain is covered by panels no wider than half an oscillation
//! period, each panel gets a 15-point Gauss–Kronrod estimate, and a global
//! worst-panel-first refinement loop bisects until the accumulated error
//! estimate meets the target. Marching stops once panel contributions fall
//! below the absolute floor — but only after the sweep has passed both the
//! decay scale and the filter's structural scale, so a suppressed low-frequency
//! region cannot masquerade as a converged tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Error;
use crate::Result;

/// Accuracy targets and budget for [`integrate_semi_infinite`].
#[derive(Copy, Clone, Debug)]
pub struct QuadratureSpec {
    /// Target relative error.
    pub rel_tol: f64,
    /// Absolute error floor; contributions below it are noise.
    pub abs_floor: f64,
    /// Maximum number of panels (seeded plus refined).
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-8, abs_floor: 1e-12, max_panels: 4096 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_floor > 0.0) || self.max_panels < 1 {
            return Err(Error::invalid(format!(
                "quadrature spec requires rel_tol > 0, abs_floor > 0, max_panels >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// An integral value with its accumulated error estimate.
#[derive(Copy, Clone, Debug)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `(0, ∞)`.
///
/// `cutoff_scale` is the exponential decay scale of the integrand (the bath
/// cutoff `ω_c`); `oscillation_scale` bounds the phase derivative, so panels
/// are kept no wider than `π/oscillation_scale` (pass 0 for a smooth,
/// non-oscillatory integrand). Panels start at `1e-12·cutoff_scale`; callers
/// must supply integrands already finite at small arguments.
pub fn integrate_semi_infinite<F>(
    f: F,
    cutoff_scale: f64,
    oscillation_scale: f64,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(cutoff_scale > 0.0) || oscillation_scale < 0.0 {
        return Err(Error::invalid(format!(
            "cutoff_scale must be positive and oscillation_scale non-negative, got {cutoff_scale}, {oscillation_scale}"
        )));
    }

    let structure = if oscillation_scale > 0.0 {
        2.0 * std::f64::consts::PI / oscillation_scale
    } else {
        cutoff_scale
    };
    let width = if oscillation_scale > 0.0 {
        (std::f64::consts::PI / oscillation_scale).min(2.0 * cutoff_scale)
    } else {
        2.0 * cutoff_scale
    };
    // hard sweep cap, tracking both the decay and the filter structure
    let sweep_end = 50.0 * cutoff_scale.max(structure);
    // no truncation before the sweep has cleared the decay and the structure
    let horizon = (10.0 * cutoff_scale).max(structure);

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut panels = 0usize;

    let mut a = 1e-12 * cutoff_scale;
    let mut quiet_streak = 0usize;
    let mut truncated = false;
    while a < sweep_end {
        let b = (a + width).min(sweep_end);
        let (value, error) = gauss_kronrod_15(&f, a, b);
        panels += 1;
        total += value;
        total_err += error;
        heap.push(Panel { a, b, value, error });

        if value.abs() < spec.abs_floor / 16.0 && b > horizon {
            quiet_streak += 1;
            if quiet_streak >= 3 {
                truncated = true;
                break;
            }
        } else {
            quiet_streak = 0;
        }
        if panels >= spec.max_panels {
            return Err(Error::NumericFailure {
                context: "panel budget exhausted while covering the domain".into(),
                value: total,
                achieved_error: total_err,
            });
        }
        a = b;
    }

    // worst-panel-first refinement; leave room for the truncation allowance
    // so the returned estimate still meets rel_tol·|value| + abs_floor
    while total_err > spec.rel_tol * total.abs() + 0.75 * spec.abs_floor {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        if panels + 1 > spec.max_panels {
            return Err(Error::NumericFailure {
                context: "panel budget exhausted during refinement".into(),
                value: total,
                achieved_error: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its estimate
            total_err -= worst.error;
            continue;
        }
        let (lv, le) = gauss_kronrod_15(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, worst.b);
        panels += 1;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
    }

    if truncated {
        // the dropped tail is bounded by a geometric continuation of the
        // sub-threshold panels that ended the sweep
        total_err += spec.abs_floor / 4.0;
    }
    Ok(Integral { value: total, error_estimate: total_err })
}

// 15-point Kronrod nodes (positive half) with the embedded 7-point Gauss rule.
const XGK: [f64; 7] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 15(7) evaluation on `[a, b]`; returns value and a
/// QUADPACK-style rescaled error estimate from the embedded pair.
fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut samples = [0.0f64; 15];
    samples[14] = fc;

    for (i, &node) in XGK.iter().enumerate() {
        let dx = half * node;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[2 * i] = f1;
        samples[2 * i + 1] = f2;
        resk += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * (f1 + f2);
        }
    }

    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for (i, _) in XGK.iter().enumerate() {
        resasc += WGK[i] * ((samples[2 * i] - mean).abs() + (samples[2 * i + 1] - mean).abs());
    }

    let value = resk * half;
    let raw_err = ((resk - resg) * half).abs();
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();

    let mut err = raw_err;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * ((200.0 * err / resasc).powf(1.5)).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plain_exponential() {
        let spec = QuadratureSpec::default();
        let out = integrate_semi_infinite(|w| (-w).exp(), 1.0, 0.0, &spec).unwrap();
        assert_relative_eq!(out.value, 1.0, max_relative = 1e-10);
        assert!(out.error_estimate < 1e-8);
    }

    #[test]
    fn vacuum_decoherence_integrand() {
        // ∫ ω e^{−ω} (1 − cos ωt)/ω² dω = ln(1 + t²)/2 at t = 1
        let t = 1.0;
        let spec = QuadratureSpec::default();
        let out = integrate_semi_infinite(
            |w| (-w).exp() * (1.0 - (w * t).cos()) / w,
            1.0,
            t,
            &spec,
        )
        .unwrap();
        let expected = 0.5 * (1.0 + t * t).ln();
        assert_relative_eq!(out.value, expected, max_relative = 1e-10);
        assert!((out.value - expected).abs() <= out.error_estimate.max(1e-14));
    }

    #[test]
    fn twisting_integrand_long_time() {
        // ∫ ω e^{−ω} (ωt − sin ωt)/ω² dω = t − arctan t at t = 10
        let t = 10.0;
        let spec = QuadratureSpec::default();
        let out = integrate_semi_infinite(
            |w| (-w).exp() * (w * t - (w * t).sin()) / w,
            1.0,
            t,
            &spec,
        )
        .unwrap();
        let expected = 10.0 - 10.0f64.atan();
        assert_relative_eq!(out.value, expected, max_relative = 1e-10);
        assert!((out.value - expected).abs() <= out.error_estimate.max(1e-12));
    }

    #[test]
    fn result_is_stable_under_budget_doubling() {
        let t = 7.0;
        let f = |w: f64| (-w).exp() * (1.0 - (w * t).cos()) / w;
        let base = QuadratureSpec::default();
        let doubled = QuadratureSpec { max_panels: base.max_panels * 2, ..base };
        let v1 = integrate_semi_infinite(f, 1.0, t, &base).unwrap().value;
        let v2 = integrate_semi_infinite(f, 1.0, t, &doubled).unwrap().value;
        assert!((v1 - v2).abs() < base.abs_floor);
    }

    #[test]
    fn budget_exhaustion_reports_partial_value() {
        let spec = QuadratureSpec { rel_tol: 1e-14, abs_floor: 1e-300, max_panels: 8 };
        let err = integrate_semi_infinite(|w| (-w).exp() * (40.0 * w).sin(), 1.0, 40.0, &spec)
            .unwrap_err();
        match err {
            Error::NumericFailure { value, achieved_error, .. } => {
                assert!(value.is_finite());
                assert!(achieved_error > 0.0);
            }
            other => panic!("expected NumericFailure, got {other:?}"),
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let bad = QuadratureSpec { rel_tol: 0.0, ..Default::default() };
        assert!(integrate_semi_infinite(|w| w, 1.0, 0.0, &bad).is_err());
        let spec = QuadratureSpec::default();
        assert!(integrate_semi_infinite(|w| w, 0.0, 0.0, &spec).is_err());
        assert!(integrate_semi_infinite(|w| w, 1.0, -1.0, &spec).is_err());
    }
}
