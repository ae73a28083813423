//! Normalized Bessel series, the `cas` function and the Hartley-Bessel kernel.
//!
//! `B_nu(x) = sum_n (-1)^n / (n! (nu+1)_n) (x/2)^(2n)` is evaluated two ways:
//!
//! * for `|x| <= 30 + nu^2/2` the power series is summed in double-double
//!   arithmetic, which absorbs the cancellation of the alternating terms;
//! * beyond that the Hankel asymptotic expansion of `J_nu` is used together
//!   with `B_nu(x) = Gamma(nu+1) (2/x)^nu J_nu(x)`.
//!
//! Both branches report [`Error::NonConvergence`] instead of returning a value
//! whose truncation test failed.

use crate::error::{Error, Result};
use crate::quadrature::gamma;

/// Configuration shared by every kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub alpha: f64,
    pub series_tol: f64,
    pub max_terms: usize,
}

impl KernelParams {
    pub const DEFAULT_SERIES_TOL: f64 = 1e-17;
    pub const DEFAULT_MAX_TERMS: usize = 500;

    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_limits(alpha, Self::DEFAULT_SERIES_TOL, Self::DEFAULT_MAX_TERMS)
    }

    pub fn with_limits(alpha: f64, series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::config(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !(series_tol > 0.0 && series_tol <= 1e-10) {
            return Err(Error::config(format!("series_tol must lie in (0, 1e-10], got {series_tol}")));
        }
        if max_terms < 30 {
            return Err(Error::config(format!("max_terms must be >= 30, got {max_terms}")));
        }
        Ok(KernelParams { alpha, series_tol, max_terms })
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`; the empty product is 1.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + f64::from(k)))
}

/// `cos(x) + sin(x)`.
pub fn cas(x: f64) -> f64 {
    x.cos() + x.sin()
}

/// Normalized Bessel function `B_order(x)` for `order > -1`.
///
/// Even in `x`: the result for `-x` is bit-identical to the result for `x`.
pub fn normalized_bessel(order: f64, x: f64, params: &KernelParams) -> Result<f64> {
    NormalizedBessel::new(order, params)?.eval(x)
}

/// Hartley-Bessel kernel `J_lambda(x, alpha)`; depends on `lambda * x` only.
pub fn hartley_bessel_kernel(lambda: f64, x: f64, params: &KernelParams) -> Result<f64> {
    KernelEvaluator::new(params)?.eval(lambda * x)
}

/// `B_order` with the order-dependent constants of both branches precomputed.
#[derive(Debug, Clone)]
pub struct NormalizedBessel {
    order: f64,
    tol: f64,
    max_terms: usize,
    series_limit: f64,
    /// `Gamma(nu+1) 2^nu sqrt(2/pi)`
    asymptotic_scale: f64,
    /// `(2 nu + 1) pi / 4` as a double-double.
    phase: Dd,
    /// `4 nu^2`
    mu: f64,
}

impl NormalizedBessel {
    pub fn new(order: f64, params: &KernelParams) -> Result<Self> {
        if !(order > -1.0) || !order.is_finite() {
            return Err(Error::config(format!("Bessel order must be finite and > -1, got {order}")));
        }
        let two_nu_plus_one = Dd::from_sum(2.0 * order, 1.0);
        Ok(NormalizedBessel {
            order,
            tol: params.series_tol,
            max_terms: params.max_terms,
            series_limit: 30.0 + 0.5 * order * order,
            asymptotic_scale: gamma(order + 1.0) * order.exp2() * std::f64::consts::FRAC_2_PI.sqrt(),
            phase: two_nu_plus_one.mul(Dd::FRAC_PI_4),
            mu: 4.0 * order * order,
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::config(format!("Bessel argument must be finite, got {x}")));
        }
        let ax = x.abs();
        if ax <= self.series_limit {
            self.power_series(ax)
        } else {
            self.hankel_asymptotic(ax)
        }
    }

    fn non_convergence(&self, x: f64, terms: usize) -> Error {
        Error::NonConvergence { order: self.order, argument: x, terms }
    }

    fn power_series(&self, ax: f64) -> Result<f64> {
        let half = 0.5 * ax;
        let z = Dd::from_prod(half, half);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut small_run = 0;
        for n in 0..self.max_terms {
            let k = (n + 1) as f64;
            // (n+1) (nu + 1 + n)
            let denom = Dd::from_sum(self.order, k).mul_f64(k);
            term = term.mul(z).div(denom).neg();
            if term.hi.abs() < self.tol * (sum.hi.abs() + f64::MIN_POSITIVE) {
                small_run += 1;
                if small_run == 2 {
                    return Ok(sum.add(term).hi);
                }
            } else {
                small_run = 0;
            }
            sum = sum.add(term);
        }
        Err(self.non_convergence(ax, self.max_terms))
    }

    fn hankel_asymptotic(&self, ax: f64) -> Result<f64> {
        // P ~ sum_k (-1)^k a_{2k} / x^{2k},  Q ~ sum_k (-1)^k a_{2k+1} / x^{2k+1}
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term: f64 = 1.0;
        let mut small_run = 0;
        let mut converged = false;
        for k in 1..=self.max_terms {
            let odd = (2 * k - 1) as f64;
            let next = term * (self.mu - odd * odd) / (8.0 * k as f64 * ax);
            if next.abs() > term.abs() && term != 0.0 {
                // past the smallest term without meeting the tolerance
                break;
            }
            term = next;
            let signed = if (k / 2) % 2 == 0 { term } else { -term };
            if k % 2 == 0 {
                p += signed;
            } else {
                q += signed;
            }
            if term.abs() < self.tol * (p.abs() + q.abs()) {
                small_run += 1;
                if small_run == 2 {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if !converged {
            return Err(self.non_convergence(ax, self.max_terms));
        }
        let chi = Dd::from_sum(ax, -self.phase.hi).add_f64(-self.phase.lo);
        let (s, c) = chi.hi.sin_cos();
        let cos_chi = c - s * chi.lo;
        let sin_chi = s + c * chi.lo;
        let envelope = self.asymptotic_scale * ax.powf(-self.order - 0.5);
        Ok(envelope * (p * cos_chi - q * sin_chi))
    }
}

/// Evaluates `J(y) = B_{alpha-1/2}(y) + y/(2 alpha + 1) B_{alpha+1/2}(y)` for a fixed `alpha`.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    even: NormalizedBessel,
    odd: NormalizedBessel,
    odd_scale: f64,
}

impl KernelEvaluator {
    pub fn new(params: &KernelParams) -> Result<Self> {
        let alpha = params.alpha;
        if !(alpha >= 0.0) {
            return Err(Error::config(format!("kernel requires alpha >= 0, got {alpha}")));
        }
        Ok(KernelEvaluator {
            even: NormalizedBessel::new(alpha - 0.5, params)?,
            odd: NormalizedBessel::new(alpha + 0.5, params)?,
            odd_scale: 1.0 / (2.0 * alpha + 1.0),
        })
    }

    /// Kernel value at the product `y = lambda * x`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        Ok(self.even.eval(y)? + y * self.odd_scale * self.odd.eval(y)?)
    }

    /// `(J(y), J(-y))` from a single evaluation of each Bessel series.
    pub fn eval_pair(&self, y: f64) -> Result<(f64, f64)> {
        let e = self.even.eval(y)?;
        let o = y * self.odd_scale * self.odd.eval(y)?;
        Ok((e + o, e - o))
    }
}

/// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    const FRAC_PI_4: Dd = Dd { hi: std::f64::consts::FRAC_PI_4, lo: 3.061_616_997_868_383e-17 };

    fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul_f64(q1).neg());
        let q2 = r.hi / other.hi;
        let r = r.add(other.mul_f64(q2).neg());
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn params(alpha: f64) -> KernelParams {
        KernelParams::new(alpha).unwrap()
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(3.7, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
    }

    #[test]
    fn cas_examples() {
        assert_eq!(cas(0.0), 1.0);
        assert!((cas(FRAC_PI_4) - SQRT_2).abs() < 1e-15);
        assert!((cas(FRAC_PI_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bessel_at_origin_is_exactly_one() {
        let p = params(0.0);
        for order in [-0.99, -0.5, 0.0, 0.5, 1.0, 2.5, 7.0] {
            assert_eq!(normalized_bessel(order, 0.0, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn half_integer_orders_at_pi() {
        let p = params(0.0);
        assert!(normalized_bessel(0.5, PI, &p).unwrap().abs() < 1e-13);
        assert!((normalized_bessel(-0.5, PI, &p).unwrap() + 1.0).abs() < 1e-13);
    }

    #[test]
    fn half_integer_closed_forms_across_both_branches() {
        let p = params(0.0);
        let b_half = NormalizedBessel::new(0.5, &p).unwrap();
        let b_minus = NormalizedBessel::new(-0.5, &p).unwrap();
        let b_three = NormalizedBessel::new(1.5, &p).unwrap();
        let mut x: f64 = 1.0;
        while x < 120.0 {
            let (s, c) = x.sin_cos();
            assert!((b_minus.eval(x).unwrap() - c).abs() < 1e-13, "cos at {x}");
            assert!((b_half.eval(x).unwrap() - s / x).abs() < 1e-13, "sinc at {x}");
            let closed = 3.0 * (s - x * c) / (x * x * x);
            assert!((b_three.eval(x).unwrap() - closed).abs() < 1e-13, "B_3/2 at {x}");
            x += 0.37;
        }
    }

    #[test]
    fn integer_order_reference_values() {
        // B_0 = J_0; reference digits from standard tables.
        let p = params(0.0);
        let j0 = [(1.0, 0.765_197_686_557_966_6), (10.0, -0.245_935_764_451_348_3), (45.0, 0.115_818_670_673_256_3)];
        for (x, want) in j0 {
            let got = normalized_bessel(0.0, x, &p).unwrap();
            assert!((got - want).abs() < 1e-14 * want.abs().max(1.0), "J0({x}) = {got}");
        }
    }

    #[test]
    fn kernel_at_zero_frequency_is_one() {
        for alpha in [0.0, 0.5, 1.0, 2.5] {
            for x in [-11.0, -0.3, 0.0, 4.0, 19.5] {
                assert_eq!(hartley_bessel_kernel(0.0, x, &params(alpha)).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn kernel_reduces_to_cas_at_alpha_zero() {
        let eval = KernelEvaluator::new(&params(0.0)).unwrap();
        let worst = (0..=4000)
            .map(|i| -20.0 + 40.0 * f64::from(i) / 4000.0)
            .map(|y| (eval.eval(y).unwrap() - cas(y)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "max |J - cas| = {worst}");
    }

    #[test]
    fn kernel_uniform_bound() {
        for alpha in [0.5, 1.0, 2.5] {
            let eval = KernelEvaluator::new(&params(alpha)).unwrap();
            for i in 0..=2000 {
                let y = -100.0 + 200.0 * f64::from(i) / 2000.0;
                assert!(eval.eval(y).unwrap().abs() <= SQRT_2 + 1e-10);
            }
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = KernelParams::with_limits(2.0, 1e-17, 30).unwrap();
        let err = normalized_bessel(2.0, 29.0, &p).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { terms: 30, .. }));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(KernelParams::new(-0.1).is_err());
        assert!(KernelParams::with_limits(1.0, 1e-9, 100).is_err());
        assert!(KernelParams::with_limits(1.0, 0.0, 100).is_err());
        assert!(KernelParams::with_limits(1.0, 1e-12, 29).is_err());
        assert!(normalized_bessel(-1.0, 1.0, &params(0.0)).is_err());
        assert!(normalized_bessel(0.0, f64::NAN, &params(0.0)).is_err());
    }

    proptest! {
        #[test]
        fn bessel_parity_is_bitwise(order in -0.9f64..6.0, x in -120.0f64..120.0) {
            let p = params(0.0);
            let a = normalized_bessel(order, x, &p).unwrap();
            let b = normalized_bessel(order, -x, &p).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        #[test]
        fn kernel_symmetric_in_arguments(alpha in 0.0f64..4.0, l in -12.0f64..12.0, x in -12.0f64..12.0) {
            let p = params(alpha);
            let a = hartley_bessel_kernel(l, x, &p).unwrap();
            let b = hartley_bessel_kernel(x, l, &p).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        #[test]
        fn paired_evaluation_matches_single(alpha in 0.0f64..4.0, y in -150.0f64..150.0) {
            let k = KernelEvaluator::new(&params(alpha)).unwrap();
            let (plus, minus) = k.eval_pair(y).unwrap();
            prop_assert!((plus - k.eval(y).unwrap()).abs() <= 1e-15);
            prop_assert!((minus - k.eval(-y).unwrap()).abs() <= 1e-15);
        }

        #[test]
        fn double_double_division_roundtrips(a in -1e6f64..1e6, b in 1e-3f64..1e3) {
            let q = Dd::from_sum(a, 0.0).div(Dd::from_sum(b, 0.0));
            let back = q.mul_f64(b);
            prop_assert!((back.hi - a).abs() <= 1e-15 * a.abs().max(1e-300));
        }
    }
}
