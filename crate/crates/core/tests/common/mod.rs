//! Independent oracles and shared fixtures for the integration tests.
#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use hartley_bessel::quadrature::{GridSpec, QuadratureGrid, SampledFunction};
use hartley_bessel::transform::TransformPlan;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fractional bits of the fixed-point oracle (about 154 decimal digits).
const FRACTION_BITS: u32 = 512;

/// `v * 2^FRACTION_BITS` as an exact integer (inputs here never underflow the scale).
fn to_fixed(v: f64) -> BigInt {
    if v == 0.0 {
        return BigInt::zero();
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
    let shift = exp + FRACTION_BITS as i32;
    assert!(shift >= 0, "{v} is too small for the oracle scale");
    BigInt::from(sign) * (BigInt::from(mantissa) << shift as usize)
}

/// `sum_n (-1)^n (x/2)^(2n) / (n! (order+1)_n)` in exact fixed-point arithmetic.
///
/// Each term is `t_{n+1} = -t_n Q / ((n+1) D_n)` with `Q = x^2/4` and
/// `D_n = order + 1 + n` held at the working scale, so the only error is one
/// truncation per term.
pub fn bessel_oracle(order: f64, x: f64) -> f64 {
    let scale = BigInt::from(1) << FRACTION_BITS as usize;
    let fx = to_fixed(x);
    // x^2/4 at the working scale; exact whenever x has at most 255 fractional bits
    let q = (&fx * &fx) >> (FRACTION_BITS as usize + 2);
    let base = to_fixed(order) + &scale;
    let mut term = scale.clone();
    let mut sum = scale.clone();
    let tiny = BigInt::from(1) << 64usize;
    let mut n: u64 = 0;
    loop {
        let d = &base + BigInt::from(n) * &scale;
        term = -(&term * &q) / (BigInt::from(n + 1) * d);
        sum += &term;
        n += 1;
        if term.abs() < tiny && n as f64 > x.abs() {
            break;
        }
    }
    sum.to_f64().unwrap() / 2f64.powi(FRACTION_BITS as i32)
}

type PlanCache = std::sync::Mutex<Vec<(f64, usize, &'static TransformPlan)>>;

/// Default-resolution plans shared by every test in one binary, keyed by `(alpha, panels)`.
pub fn plan(alpha: f64, panels: usize) -> &'static TransformPlan {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap();
    if let Some((_, _, p)) = guard.iter().find(|(a, n, _)| *a == alpha && *n == panels) {
        return p;
    }
    let grid = GridSpec { alpha, panels, ..GridSpec::default() }.build().unwrap();
    let p: &'static TransformPlan = Box::leak(Box::new(TransformPlan::for_grid(&grid).unwrap()));
    guard.push((alpha, panels, p));
    p
}

pub fn gaussian(grid: &Arc<QuadratureGrid>, scale: f64, width: f64) -> SampledFunction {
    SampledFunction::from_fn(grid, |x| scale * (-(x / width).powi(2)).exp()).unwrap()
}

pub fn rel_l2(a: &SampledFunction, b: &SampledFunction) -> f64 {
    use hartley_bessel::quadrature::lp_norm;
    lp_norm(&a.combine(1.0, b, -1.0).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}
