//! Spectral solver for `f + f * g = g * h` (and the general right-hand side `f + f * g = rhs`).

use serde::Serialize;

use crate::convolution::{convolve, young_constant, ExponentTriple, PRIOR_CONSTANT};
use crate::error::{Error, Result};
use crate::quadrature::{lp_norm, SampledFunction};
use crate::transform::{SpectralFunction, TransformPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Smallest admissible `|1 + H g(lambda)|` over the frequency nodes.
    pub denom_threshold: f64,
    /// Bound on the L1 residual relative to the L1 norm of the right-hand side.
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { denom_threshold: 1e-6, residual_tol: 1e-6 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("denom_threshold", self.denom_threshold), ("residual_tol", self.residual_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one solve. Spatial fields are `None` when the equation was refused.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub solvable: bool,
    pub min_denominator: f64,
    /// Frequency node where `|1 + H g|` is smallest.
    pub min_denominator_lambda: f64,
    pub warnings: Vec<String>,
    pub solution_f: Option<SampledFunction>,
    /// `l` with `H l = G / (1 + G)`; absent for a general right-hand side.
    pub multiplier_l: Option<SampledFunction>,
    pub h: Option<SampledFunction>,
    pub residual_l1: f64,
    /// L1 norm of the right-hand side (`g * h`, or the supplied one).
    pub rhs_l1: f64,
    pub config: SolverConfig,
    /// `||f||_1`.
    pub bound_lhs: f64,
    /// `4 ||l||_1 ||h||_1`.
    pub bound_rhs: f64,
}

impl SolverReport {
    pub fn relative_residual(&self) -> f64 {
        if self.rhs_l1 > 0.0 {
            self.residual_l1 / self.rhs_l1
        } else {
            self.residual_l1
        }
    }

    pub fn residual_ok(&self) -> bool {
        self.relative_residual() <= self.config.residual_tol
    }
}

struct Denominator {
    g_hat: SpectralFunction,
    denom: SpectralFunction,
    min: f64,
    argmin: f64,
    /// Adjacent frequency nodes between which `1 + G` changes sign.
    crossing: Option<(f64, f64)>,
}

impl Denominator {
    fn vanishes(&self, cfg: &SolverConfig) -> bool {
        self.min < cfg.denom_threshold || self.crossing.is_some()
    }
}

fn denominator(plan: &TransformPlan, g: &SampledFunction) -> Result<Denominator> {
    let g_hat = plan.forward(g)?;
    let denom = g_hat.map(|v| 1.0 + v);
    let (min, argmin) = denom.values().iter().zip(denom.lambdas()).fold((f64::INFINITY, 0.0), |(m, at), (d, &l)| {
        if d.abs() < m {
            (d.abs(), l)
        } else {
            (m, at)
        }
    });
    let lambdas = denom.lambdas();
    let crossing = denom.values().windows(2).position(|w| w[0] * w[1] < 0.0).map(|i| (lambdas[i], lambdas[i + 1]));
    Ok(Denominator { g_hat, denom, min, argmin, crossing })
}

fn warnings_for(cfg: &SolverConfig, d: &Denominator, inputs: &[(&str, &SampledFunction)]) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some((a, b)) = d.crossing {
        warnings.push(format!("1 + Hg changes sign between lambda = {a} and lambda = {b}, so it vanishes there"));
    }
    if !d.vanishes(cfg) && d.min < 10.0 * cfg.denom_threshold {
        warnings.push(format!(
            "min |1 + Hg| = {:e} at lambda = {} is within 10x of the threshold; 1 + Hg may vanish between nodes",
            d.min, d.argmin
        ));
    }
    for (name, f) in inputs {
        let decay = f.decay();
        if !decay.ok {
            warnings.push(format!("{name} has not decayed at the truncation boundary (ratio {:e})", decay.ratio));
        }
    }
    warnings
}

fn refused(cfg: &SolverConfig, d: &Denominator, warnings: Vec<String>) -> SolverReport {
    SolverReport {
        solvable: false,
        min_denominator: d.min,
        min_denominator_lambda: d.argmin,
        warnings,
        solution_f: None,
        multiplier_l: None,
        h: None,
        residual_l1: f64::NAN,
        rhs_l1: f64::NAN,
        config: *cfg,
        bound_lhs: f64::NAN,
        bound_rhs: f64::NAN,
    }
}

/// Solves `f + f * g = g * h` via `H l = G/(1+G)` and `f = l * h`.
pub fn solve_integral_equation(
    plan: &TransformPlan,
    g: &SampledFunction,
    h: &SampledFunction,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    let d = denominator(plan, g)?;
    let h_hat = plan.forward(h)?;
    let warnings = warnings_for(cfg, &d, &[("g", g), ("h", h)]);
    if d.vanishes(cfg) {
        return Ok(refused(cfg, &d, warnings));
    }
    let l_hat = SpectralFunction::new(
        plan.grid().clone(),
        d.g_hat.values().iter().zip(d.denom.values()).map(|(g, den)| g / den).collect(),
    )?;
    let l = plan.inverse(&l_hat)?;
    let f = plan.inverse(&l_hat.product(&h_hat)?)?;
    let rhs = plan.inverse(&d.g_hat.product(&h_hat)?)?;
    let residual_l1 = residual_against(plan, &f, g, &rhs)?;
    let bound_lhs = lp_norm(&f, 1.0)?;
    let bound_rhs = PRIOR_CONSTANT * lp_norm(&l, 1.0)? * lp_norm(h, 1.0)?;
    Ok(SolverReport {
        solvable: true,
        min_denominator: d.min,
        min_denominator_lambda: d.argmin,
        warnings,
        solution_f: Some(f),
        multiplier_l: Some(l),
        h: Some(h.clone()),
        residual_l1,
        rhs_l1: lp_norm(&rhs, 1.0)?,
        config: *cfg,
        bound_lhs,
        bound_rhs,
    })
}

/// Solves `f + f * g = rhs` via `H f = H rhs / (1 + G)`.
pub fn solve_with_rhs(
    plan: &TransformPlan,
    g: &SampledFunction,
    rhs: &SampledFunction,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    let d = denominator(plan, g)?;
    let rhs_hat = plan.forward(rhs)?;
    let warnings = warnings_for(cfg, &d, &[("g", g), ("rhs", rhs)]);
    if d.vanishes(cfg) {
        return Ok(refused(cfg, &d, warnings));
    }
    let f_hat = SpectralFunction::new(
        plan.grid().clone(),
        rhs_hat.values().iter().zip(d.denom.values()).map(|(r, den)| r / den).collect(),
    )?;
    let f = plan.inverse(&f_hat)?;
    let residual_l1 = residual_against(plan, &f, g, rhs)?;
    Ok(SolverReport {
        solvable: true,
        min_denominator: d.min,
        min_denominator_lambda: d.argmin,
        warnings,
        bound_lhs: lp_norm(&f, 1.0)?,
        solution_f: Some(f),
        multiplier_l: None,
        h: None,
        residual_l1,
        rhs_l1: lp_norm(rhs, 1.0)?,
        config: *cfg,
        bound_rhs: f64::NAN,
    })
}

fn residual_against(
    plan: &TransformPlan,
    f: &SampledFunction,
    g: &SampledFunction,
    rhs: &SampledFunction,
) -> Result<f64> {
    let lhs = f.combine(1.0, &convolve(plan, f, g)?, 1.0)?;
    lp_norm(&lhs.combine(1.0, rhs, -1.0)?, 1.0)
}

/// `||f + f * g - g * h||_1`.
pub fn residual(plan: &TransformPlan, f: &SampledFunction, g: &SampledFunction, h: &SampledFunction) -> Result<f64> {
    residual_against(plan, f, g, &convolve(plan, g, h)?)
}

/// One norm bound `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        BoundCheck { lhs, rhs, ratio, holds: ratio <= 1.0 + tol }
    }
}

/// The L1 estimate with constant 4 and its sharper variants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriReport {
    /// `||f||_1 <= 4 ||l||_1 ||h||_1`.
    pub l1: BoundCheck,
    /// `||f||_2 <= sqrt2 ||l||_2 ||h||_1`.
    pub case_a: BoundCheck,
    /// `||f||_inf <= sqrt2 ||l||_2 ||h||_2`.
    pub case_b: BoundCheck,
    /// `||f||_{r'} <= C_{p,q,r} ||l||_p ||h||_q` for the requested triple.
    pub case_c: Option<(ExponentTriple, BoundCheck)>,
}

impl AprioriReport {
    pub fn all_hold(&self) -> bool {
        self.l1.holds && self.case_a.holds && self.case_b.holds && self.case_c.as_ref().is_none_or(|(_, c)| c.holds)
    }
}

fn young_bound(
    f: &SampledFunction,
    l: &SampledFunction,
    h: &SampledFunction,
    t: &ExponentTriple,
    tol: f64,
) -> Result<BoundCheck> {
    Ok(BoundCheck::new(lp_norm(f, t.r1)?, young_constant(t) * lp_norm(l, t.p)? * lp_norm(h, t.q)?, tol))
}

/// Evaluates the a-priori estimates on a solved report; `triple` selects the general case (C).
pub fn check_apriori_bound(report: &SolverReport, triple: Option<(f64, f64, f64)>, tol: f64) -> Result<AprioriReport> {
    let (Some(f), Some(l), Some(h)) = (&report.solution_f, &report.multiplier_l, &report.h) else {
        return Err(Error::ReportNotSolvable);
    };
    let case_c = match triple {
        Some((p, q, r)) => {
            let t = ExponentTriple::new(p, q, r)?;
            Some((t, young_bound(f, l, h, &t, tol)?))
        }
        None => None,
    };
    Ok(AprioriReport {
        l1: BoundCheck::new(report.bound_lhs, report.bound_rhs, tol),
        case_a: young_bound(f, l, h, &ExponentTriple::new(2.0, 1.0, 2.0)?, tol)?,
        case_b: young_bound(f, l, h, &ExponentTriple::new(2.0, 2.0, 1.0)?, tol)?,
        case_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{GridSpec, Scheme};
    use std::sync::{Arc, OnceLock};

    fn plan() -> &'static TransformPlan {
        static PLAN: OnceLock<TransformPlan> = OnceLock::new();
        PLAN.get_or_init(|| {
            let g =
                GridSpec { alpha: 1.0, radius: 10.0, panels: 60, points_per_panel: 4, scheme: Scheme::GaussLegendre }
                    .build()
                    .unwrap();
            TransformPlan::for_grid(&g).unwrap()
        })
    }

    fn gaussian(grid: &Arc<crate::quadrature::QuadratureGrid>, scale: f64, width: f64) -> SampledFunction {
        SampledFunction::from_fn(grid, |x| scale * (-(x / width).powi(2)).exp()).unwrap()
    }

    #[test]
    fn zero_kernel_gives_zero_solution() {
        let p = plan();
        let h = gaussian(p.grid(), 1.0, 1.0);
        let r = solve_integral_equation(p, &SampledFunction::zeros(p.grid()), &h, &SolverConfig::default()).unwrap();
        assert!(r.solvable);
        assert!(r.solution_f.unwrap().values().iter().all(|&v| v == 0.0));
        assert_eq!(r.residual_l1, 0.0);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let p = plan();
        let g = gaussian(p.grid(), 0.2, 1.0);
        let r = solve_integral_equation(p, &g, &SampledFunction::zeros(p.grid()), &SolverConfig::default()).unwrap();
        assert!(r.solvable);
        assert!(r.solution_f.as_ref().unwrap().values().iter().all(|&v| v == 0.0));
        assert_eq!(r.residual_l1, 0.0);
        let bounds = check_apriori_bound(&r, None, 1e-9).unwrap();
        assert!(bounds.all_hold());
        assert_eq!(bounds.l1.lhs, 0.0);
    }

    #[test]
    fn refuses_vanishing_denominator() {
        let p = plan();
        let g = gaussian(p.grid(), 1.0, 1.0);
        let g_hat = p.forward(&g).unwrap();
        let j = (0..g_hat.values().len()).max_by(|&a, &b| g_hat.values()[a].total_cmp(&g_hat.values()[b])).unwrap();
        let g = g.scaled(-1.0 / g_hat.values()[j]);
        let r = solve_integral_equation(p, &g, &gaussian(p.grid(), 1.0, 1.0), &SolverConfig::default()).unwrap();
        assert!(!r.solvable);
        assert!(r.min_denominator < 1e-6);
        assert!(r.solution_f.is_none());
        assert!(matches!(check_apriori_bound(&r, None, 1e-9), Err(Error::ReportNotSolvable)));
    }

    #[test]
    fn refuses_sign_change_between_nodes() {
        let p = plan();
        let g = gaussian(p.grid(), -3.0, 1.0);
        let r = solve_integral_equation(p, &g, &gaussian(p.grid(), 1.0, 1.0), &SolverConfig::default()).unwrap();
        assert!(!r.solvable);
        assert!(r.min_denominator > 1e-6);
        assert!(r.warnings.iter().any(|w| w.contains("changes sign")));
    }

    #[test]
    fn inadmissible_triple_surfaces() {
        let p = plan();
        let r = solve_integral_equation(
            p,
            &gaussian(p.grid(), 0.2, 1.0),
            &gaussian(p.grid(), 1.0, 1.0),
            &SolverConfig::default(),
        )
        .unwrap();
        let err = check_apriori_bound(&r, Some((2.0, 2.0, 2.0)), 1e-9).unwrap_err();
        assert!(matches!(err, Error::InvalidExponent(_)));
    }

    #[test]
    fn invalid_config_rejected() {
        let p = plan();
        let z = SampledFunction::zeros(p.grid());
        let cfg = SolverConfig { denom_threshold: 0.0, ..SolverConfig::default() };
        assert!(matches!(solve_integral_equation(p, &z, &z, &cfg), Err(Error::InvalidConfig(_))));
    }
}
