mod common;

use std::f64::consts::{PI, SQRT_2};

use common::bessel_oracle;
use hartley_bessel::special_functions::{
    cas, hartley_bessel_kernel, normalized_bessel, pochhammer, KernelEvaluator, KernelParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> KernelParams {
    KernelParams::new(0.0).unwrap()
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
    assert!((cas(PI / 4.0) - SQRT_2).abs() < 1e-15);
    assert!((cas(PI / 2.0) - 1.0).abs() < 1e-15);
}

#[test]
fn oracle_reproduces_half_integer_closed_forms() {
    for x in [0.5, 1.0, PI, 7.25, 20.0, 49.5] {
        let sinc = x.sin() / x;
        assert!((bessel_oracle(0.5, x) - sinc).abs() < 1e-15, "x={x}");
        assert!((bessel_oracle(-0.5, x) - x.cos()).abs() < 1e-15, "x={x}");
    }
}

#[test]
fn half_integer_values_at_pi() {
    assert!(normalized_bessel(0.5, PI, &params()).unwrap().abs() < 1e-13);
    assert!((normalized_bessel(-0.5, PI, &params()).unwrap() + 1.0).abs() < 1e-13);
}

#[test]
fn agrees_with_oracle_on_seeded_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = params();
    for _ in 0..150 {
        let order = rng.gen_range(-0.5..=5.0);
        let x = rng.gen_range(-50.0..=50.0);
        let want = bessel_oracle(order, x);
        let got = normalized_bessel(order, x, &p).unwrap();
        // absolute floor guards points sitting on a zero of B
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-4), "B_{order}({x}) = {got}, oracle {want}");
    }
}

#[test]
fn kernel_reduces_to_cas() {
    let k = KernelEvaluator::new(&params()).unwrap();
    let worst = (0..=10_000)
        .map(|i| -20.0 + 40.0 * f64::from(i) / 10_000.0)
        .map(|y| (k.eval(y).unwrap() - cas(y)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn kernel_at_zero_frequency() {
    for alpha in [0.0, 0.5, 1.0, 2.5] {
        let p = KernelParams::new(alpha).unwrap();
        for x in [-7.0, 0.0, 3.3, 12.0] {
            assert_eq!(hartley_bessel_kernel(0.0, x, &p).unwrap(), 1.0);
        }
    }
}

#[test]
fn evaluation_beyond_term_budget_fails_loudly() {
    let p = KernelParams::with_limits(3.0, 1e-17, 30).unwrap();
    let err = normalized_bessel(3.0, 30.0, &p).unwrap_err();
    assert!(err.is_non_convergence());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_bounded_by_sqrt2(alpha in 0.01f64..5.0, l in -10.0f64..10.0, x in -10.0f64..10.0) {
        let v = hartley_bessel_kernel(l, x, &KernelParams::new(alpha).unwrap()).unwrap();
        prop_assert!(v.abs() <= SQRT_2 + 1e-10);
    }

    #[test]
    fn bessel_is_even_bit_for_bit(order in -0.99f64..8.0, x in -150.0f64..150.0) {
        let p = params();
        prop_assert_eq!(
            normalized_bessel(order, x, &p).unwrap().to_bits(),
            normalized_bessel(order, -x, &p).unwrap().to_bits()
        );
    }

    #[test]
    fn bessel_at_origin_is_one(order in -0.99f64..50.0) {
        prop_assert_eq!(normalized_bessel(order, 0.0, &params()).unwrap(), 1.0);
    }
}
