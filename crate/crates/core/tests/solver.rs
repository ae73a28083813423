mod common;

use common::{gaussian, plan};
use hartley_bessel::convolution::convolve;
use hartley_bessel::quadrature::{lp_norm, FunctionSpec, SampledFunction};
use hartley_bessel::solver::{check_apriori_bound, residual, solve_integral_equation, solve_with_rhs, SolverConfig};
use hartley_bessel::transform::TransformPlan;

fn spec(s: &str) -> FunctionSpec {
    s.parse().unwrap()
}

fn rel_l1(a: &SampledFunction, b: &SampledFunction) -> f64 {
    lp_norm(&a.combine(1.0, b, -1.0).unwrap(), 1.0).unwrap() / lp_norm(b, 1.0).unwrap()
}

#[test]
fn small_gaussian_kernel_solves_to_tolerance() {
    let p = plan(1.0, 400);
    let g = gaussian(p.grid(), 0.2, 1.0);
    let h = gaussian(p.grid(), 1.0, 1.5);
    let r = solve_integral_equation(p, &g, &h, &SolverConfig::default()).unwrap();
    assert!(r.solvable && r.warnings.is_empty(), "{:?}", r.warnings);
    let scale = lp_norm(&convolve(p, &g, &h).unwrap(), 1.0).unwrap();
    assert!(r.residual_l1 / scale < 1e-6);
    let f = r.solution_f.as_ref().unwrap();
    assert!((residual(p, f, &g, &h).unwrap() - r.residual_l1).abs() <= 1e-15 * scale.max(1.0));
    let bounds = check_apriori_bound(&r, Some((1.5, 1.5, 1.5)), 1e-9).unwrap();
    assert!(bounds.all_hold());
    for b in [bounds.l1, bounds.case_a, bounds.case_b, bounds.case_c.unwrap().1] {
        assert!(b.ratio < 1.0, "{b:?}");
    }
}

#[test]
fn manufactured_solution_is_recovered() {
    let p = plan(1.0, 400);
    let f0 = spec("hermite_gaussian:2").sample(p.grid()).unwrap();
    let g = spec("0.5*gaussian:1").sample(p.grid()).unwrap();
    assert!(p.forward(&g).unwrap().max_abs() < 1.0);
    let rhs = f0.combine(1.0, &convolve(p, &f0, &g).unwrap(), 1.0).unwrap();
    let r = solve_with_rhs(p, &g, &rhs, &SolverConfig::default()).unwrap();
    let f = r.solution_f.as_ref().unwrap();
    assert!(rel_l1(f, &f0) < 1e-5);
    assert!(r.residual_l1 < 1e-8, "{:e}", r.residual_l1);
}

#[test]
fn spectral_identity_holds() {
    let p = plan(1.0, 400);
    let g = spec("0.3*random_bandlimited:8,3").sample(p.grid()).unwrap();
    // convolution widens support, so keep h well inside [-R, R]
    let h = spec("bump:6,6").sample(p.grid()).unwrap();
    let r = solve_integral_equation(p, &g, &h, &SolverConfig::default()).unwrap();
    let big_g = p.forward(&g).unwrap();
    let expected = big_g.map(|v| v / (1.0 + v)).product(&p.forward(&h).unwrap()).unwrap();
    let got = p.forward(r.solution_f.as_ref().unwrap()).unwrap();
    let defect = got.combine(1.0, &expected, -1.0).unwrap().lp_norm(2.0).unwrap();
    assert!(defect <= 1e-5 * expected.lp_norm(2.0).unwrap());
}

#[test]
fn residual_reacts_boundedly_to_perturbation() {
    let p = plan(1.0, 400);
    let g = gaussian(p.grid(), 0.2, 1.0);
    let h = gaussian(p.grid(), 1.0, 1.5);
    let r = solve_integral_equation(p, &g, &h, &SolverConfig::default()).unwrap();
    let f = r.solution_f.unwrap();
    let bump = spec("bump:2").sample(p.grid()).unwrap();
    let unit = bump.scaled(1.0 / lp_norm(&bump, 1.0).unwrap());
    let g1 = lp_norm(&g, 1.0).unwrap();
    for delta in [1e-6, 1e-3, 0.1] {
        let perturbed = f.combine(1.0, &unit, delta).unwrap();
        let change = (residual(p, &perturbed, &g, &h).unwrap() - r.residual_l1).abs();
        assert!(change <= delta * (1.0 + 4.0 * g1) + 1e-12, "delta={delta}: {change:e}");
    }
}

#[test]
fn scaled_kernel_keeps_denominator_away_from_zero() {
    let p = plan(1.0, 400);
    let g = spec("hermite_gaussian:2").sample(p.grid()).unwrap();
    let sup = p.forward(&g).unwrap().max_abs();
    let h = gaussian(p.grid(), 1.0, 1.0);
    for c in [0.1, 0.5, 0.9] {
        let scale = c / sup;
        let r = solve_integral_equation(p, &g.scaled(scale), &h, &SolverConfig::default()).unwrap();
        assert!(r.min_denominator >= 1.0 - c - 1e-12, "c={c}");
    }
}

#[test]
fn repeated_solves_are_identical() {
    let p = plan(1.0, 400);
    let g = gaussian(p.grid(), 0.4, 1.1);
    let rhs = spec("random_bandlimited:77,5").sample(p.grid()).unwrap();
    let a = solve_with_rhs(p, &g, &rhs, &SolverConfig::default()).unwrap();
    let b = solve_with_rhs(p, &g, &rhs, &SolverConfig::default()).unwrap();
    let (fa, fb) = (a.solution_f.unwrap(), b.solution_f.unwrap());
    assert!(rel_l1(&fa, &fb) <= 1e-12);
}

#[test]
fn residual_shrinks_under_refinement() {
    let run = |p: &TransformPlan| {
        let g = gaussian(p.grid(), 0.3, 1.0);
        let h = spec("bump:12,8").sample(p.grid()).unwrap();
        let r = solve_integral_equation(p, &g, &h, &SolverConfig::default()).unwrap();
        r.relative_residual()
    };
    let coarse = run(plan(0.5, 400));
    let fine = run(plan(0.5, 800));
    assert!(fine < coarse, "{fine:e} vs {coarse:e}");
}

#[test]
fn trivial_inputs() {
    let p = plan(1.0, 400);
    let zero = SampledFunction::zeros(p.grid());
    let h = gaussian(p.grid(), 1.0, 1.0);
    let r = solve_integral_equation(p, &zero, &h, &SolverConfig::default()).unwrap();
    assert_eq!(r.solution_f.as_ref().unwrap().max_abs(), 0.0);
    assert_eq!(r.residual_l1, 0.0);
    assert_eq!(residual(p, &zero, &zero, &zero).unwrap(), 0.0);
}
