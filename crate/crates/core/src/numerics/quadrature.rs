//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals,
//! plus the compactified rule for `[a, ∞)`.
//!
//! The semi-infinite rule substitutes `t = a + u / (1 - u)`, which maps
//! `[a, ∞)` onto `[0, 1)`; the Kronrod abscissas are interior points, so the
//! singular endpoint `u = 1` is never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Default absolute/relative tolerance for model integrals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Integrand evaluations allowed per integral before signalling failure.
pub const DEFAULT_MAX_EVALS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule: accept once `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            rel_tol: tol,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    /// Purely relative accuracy; used where values may be many orders of
    /// magnitude below one (survival tails).
    pub fn relative(tol: f64) -> Self {
        QuadOptions {
            abs_tol: f64::MIN_POSITIVE,
            rel_tol: tol,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::new(DEFAULT_TOL)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at: x })
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let fc = checked(f, centr)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for (j, &wg) in WG.iter().enumerate().take(3) {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = checked(f, centr - absc)?;
        let f2 = checked(f, centr + absc)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = checked(f, centr - absc)?;
        let f2 = checked(f, centr + absc)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut error = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        floor,
    })
}

fn adaptive<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut floor = first.floor;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut iterations = 0usize;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target || error <= 2.0 * floor {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if evaluations + 30 > opts.max_evals {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                evaluations,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);

        iterations += 1;
        if iterations.is_multiple_of(64) {
            // refresh running sums to keep cancellation drift out of the stopping rule
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            floor = heap.iter().map(|s| s.floor).sum();
        }
    }
}

/// `∫_a^b f` for a fallible integrand.
pub fn integrate_finite_with<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a <= b) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    adaptive(f, a, b, opts)
}

/// `∫_a^∞ f` for a fallible integrand, via the compactifying substitution.
pub fn integrate_tail_with<F>(mut f: F, a: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lower bound must be finite, got {a}"
        )));
    }
    let mapped = move |u: f64| -> Result<f64> {
        let one_minus = 1.0 - u;
        let t = a + u / one_minus;
        if !t.is_finite() {
            return Ok(0.0);
        }
        let v = f(t)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(v / (one_minus * one_minus))
    };
    adaptive(mapped, 0.0, 1.0, opts)
}

/// `∫_0^∞ f` with the default stopping rule at tolerance `tol`.
pub fn integrate_semi_infinite<F>(f: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_tail_with(|t| Ok(f(t)), 0.0, &QuadOptions::new(tol))
}

/// `∫_a^b f` with the default stopping rule at tolerance `tol`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_finite_with(|t| Ok(f(t)), a, b, &QuadOptions::new(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_normalizes() {
        let r = integrate_semi_infinite(|t| (-t).exp(), 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.error_estimate <= 1e-9);
    }

    #[test]
    fn inner_integral_of_exponential_mixing() {
        let r = integrate_semi_infinite(|t| (-(10.0 * 0.5 + 1.0) * t).exp(), 1e-9).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn half_cauchy_normalizes() {
        let r = integrate_semi_infinite(|t| 2.0 / (PI * (1.0 + t * t)), 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn finite_examples() {
        assert!((integrate_finite(|_| 1.0, 0.0, 1.0, 1e-9).unwrap().value - 1.0).abs() < 1e-12);
        let r = integrate_finite(|t| (-t).exp(), 0.0, 20.0, 1e-9).unwrap();
        assert!((r.value - (1.0 - (-20.0f64).exp())).abs() < 1e-9);
        let r = integrate_finite(|t| 2.0 * t, 0.0, 1.0, 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate_finite(|t| t, 2.0, 2.0, 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(matches!(
            integrate_finite(|t| t, 1.0, 0.0, 1e-9),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn nan_integrand_is_reported() {
        let err = integrate_finite(|t| if t > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-9)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn budget_exhaustion_is_reported_with_estimate() {
        // non-integrable singularity at 0
        let opts = QuadOptions::new(1e-12).with_max_evals(2_000);
        let err = integrate_finite_with(|t: f64| Ok(1.0 / t.abs().max(1e-300)), 0.0, 1.0, &opts)
            .unwrap_err();
        match err {
            Error::QuadratureFailure { estimate, evaluations, .. } => {
                assert!(estimate > 1.0);
                assert!(evaluations <= 2_000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn relative_rule_resolves_tiny_tails() {
        // ∫_30^∞ e^{-t} = e^{-30}
        let r = integrate_tail_with(|t: f64| Ok((-t).exp()), 30.0, &QuadOptions::relative(1e-10))
            .unwrap();
        let exact = (-30.0f64).exp();
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn kinked_integrand_converges() {
        let r = integrate_finite(|t| (t - 0.3).abs(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-10);
    }
}
