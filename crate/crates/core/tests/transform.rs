mod common;

use std::f64::consts::{PI, SQRT_2};

use common::{gaussian, plan, rel_l2};
use hartley_bessel::quadrature::{lp_norm, FunctionSpec, SampledFunction};
use hartley_bessel::transform::{check_hausdorff_young, plancherel_defect, round_trip_error, SpectralFunction};
use rayon::prelude::*;

fn corpus() -> Vec<FunctionSpec> {
    ["gaussian:1", "bump:12,8", "hermite_gaussian:4", "random_bandlimited:42,8"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

#[test]
fn gaussian_plancherel_at_default_resolution() {
    let p = plan(1.0, 400);
    assert!(p.len() >= 1200);
    let f = gaussian(p.grid(), 1.0, 1.0);
    assert!(plancherel_defect(p, &f).unwrap() < 1e-6);
}

#[test]
fn alpha_zero_matches_refined_trapezoid() {
    // H f(lambda) = (2 pi)^(-1/2) * integral of (cos + sin)(lambda x) exp(-x^2) over [-12, 12]
    let p = plan(0.0, 400);
    let f = gaussian(p.grid(), 1.0, 1.0);
    let spectrum = p.forward(&f).unwrap();
    let steps = 4 * p.len();
    let h = 24.0 / steps as f64;
    let oracle = |lambda: f64| {
        let sum: f64 = (0..=steps)
            .map(|k| {
                let x = -12.0 + h * k as f64;
                let end = if k == 0 || k == steps { 0.5 } else { 1.0 };
                end * ((lambda * x).cos() + (lambda * x).sin()) * (-x * x).exp()
            })
            .sum();
        sum * h / (2.0 * PI).sqrt()
    };
    for (lambda, got) in spectrum.lambdas().iter().zip(spectrum.values()).step_by(7) {
        assert!((got - oracle(*lambda)).abs() < 1e-8, "lambda={lambda}");
    }
}

#[test]
fn round_trip_recovers_gaussian() {
    let p = plan(1.0, 400);
    let f = gaussian(p.grid(), 1.0, 1.0);
    let back = p.inverse(&p.forward(&f).unwrap()).unwrap();
    assert!(rel_l2(&back, &f) < 1e-6);
}

#[test]
fn round_trip_on_corpus() {
    for alpha in [0.5, 1.0, 2.5] {
        let p = plan(alpha, 400);
        for spec in corpus() {
            let f = spec.sample(p.grid()).unwrap();
            let err = round_trip_error(p, &f).unwrap();
            assert!(err < 1e-5, "alpha={alpha} {spec}: {err:e}");
        }
    }
}

#[test]
fn plancherel_on_corpus() {
    for alpha in [0.5, 1.0, 2.5] {
        let p = plan(alpha, 400);
        for spec in corpus() {
            let f = spec.sample(p.grid()).unwrap();
            assert!(f.decay().ok, "{spec}");
            let d = plancherel_defect(p, &f).unwrap();
            assert!(d < 1e-6, "alpha={alpha} {spec}: {d:e}");
        }
    }
}

#[test]
fn transform_is_linear() {
    let p = plan(1.0, 400);
    let f = gaussian(p.grid(), 1.0, 1.3);
    let g: SampledFunction = "hermite_gaussian:2".parse::<FunctionSpec>().unwrap().sample(p.grid()).unwrap();
    let (a, b) = (2.5, -0.75);
    let lhs = p.forward(&f.combine(a, &g, b).unwrap()).unwrap();
    let rhs = p.forward(&f).unwrap().combine(a, &p.forward(&g).unwrap(), b).unwrap();
    let diff = lhs.combine(1.0, &rhs, -1.0).unwrap().lp_norm(2.0).unwrap();
    assert!(diff <= 1e-13 * rhs.lp_norm(2.0).unwrap());
}

#[test]
fn zero_maps_to_zero() {
    let p = plan(1.0, 400);
    assert_eq!(p.forward(&SampledFunction::zeros(p.grid())).unwrap().max_abs(), 0.0);
    assert_eq!(p.inverse(&SpectralFunction::zeros(p.grid())).unwrap().max_abs(), 0.0);
}

#[test]
fn hausdorff_young_endpoints() {
    let p = plan(1.0, 400);
    let f = gaussian(p.grid(), 1.0, 1.0);
    let two = check_hausdorff_young(p, &f, 2.0, 1e-6).unwrap();
    assert_eq!(two.constant, 1.0);
    assert!((two.lhs - two.rhs).abs() <= 1e-6 * two.rhs);
    let one = check_hausdorff_young(p, &f, 1.0, 1e-6).unwrap();
    assert!((one.constant - SQRT_2).abs() < 1e-15);
    assert!(p.forward(&f).unwrap().max_abs() <= SQRT_2 * lp_norm(&f, 1.0).unwrap());
    assert!(one.pass);
}

#[test]
fn concurrent_transforms_match_sequential() {
    let p = plan(1.0, 400);
    let specs: Vec<FunctionSpec> = (0..8).map(|s| format!("random_bandlimited:{s},5").parse().unwrap()).collect();
    let sequential: Vec<Vec<f64>> =
        specs.iter().map(|s| p.forward(&s.sample(p.grid()).unwrap()).unwrap().into_values()).collect();
    let parallel: Vec<Vec<f64>> =
        specs.par_iter().map(|s| p.forward(&s.sample(p.grid()).unwrap()).unwrap().into_values()).collect();
    assert_eq!(sequential, parallel);
}
