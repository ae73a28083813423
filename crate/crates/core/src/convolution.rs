//! Spectral convolution `f * g = H(H f . H g)` and the Young-type inequality checks.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{lp_norm, SampledFunction};
use crate::transform::{conjugate_exponent, TransformPlan};

/// Slack allowed in `1/p' + 1/q' = 1/r`.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;
/// Constant of the earlier Young-type bound.
pub const PRIOR_CONSTANT: f64 = 4.0;
/// Ratio slack when the left-hand side is a sup norm.
pub const SUP_NORM_TOL: f64 = 1e-4;
/// Ratio slack for finite-exponent left-hand sides.
pub const FINITE_NORM_TOL: f64 = 1e-6;

/// Exponents `(p, q, r)` in `[1, 2]` with `1/p' + 1/q' = 1/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub p1: f64,
    pub q1: f64,
    pub r1: f64,
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if !(1.0..=2.0).contains(&v) {
                return Err(Error::exponent(format!("{name} = {v} is outside [1, 2]")));
            }
        }
        let (p1, q1, r1) = (conjugate_exponent(p), conjugate_exponent(q), conjugate_exponent(r));
        let defect = 1.0 / p1 + 1.0 / q1 - 1.0 / r;
        if defect.abs() > ADMISSIBILITY_TOL {
            return Err(Error::exponent(format!("({p}, {q}, {r}) is not admissible: 1/p' + 1/q' - 1/r = {defect:e}")));
        }
        Ok(ExponentTriple { p, q, r, p1, q1, r1 })
    }

    /// Triples exercised by the certification sweep.
    pub fn standard() -> Vec<ExponentTriple> {
        [
            (2.0, 2.0, 1.0),
            (2.0, 1.0, 2.0),
            (1.0, 2.0, 2.0),
            (1.5, 1.5, 1.5),
            (4.0 / 3.0, 4.0 / 3.0, 2.0),
            (2.0, 4.0 / 3.0, 4.0 / 3.0),
        ]
        .into_iter()
        .map(|(p, q, r)| ExponentTriple::new(p, q, r).expect("standard triples are admissible"))
        .collect()
    }

    /// Ratio slack appropriate for the output norm `r'`.
    pub fn default_tol(&self) -> f64 {
        if self.r1.is_infinite() {
            SUP_NORM_TOL
        } else {
            FINITE_NORM_TOL
        }
    }
}

/// `C_{p,q,r} = (sqrt 2)^((2/p - 1) + (2/q - 1) + (2/r - 1))`.
pub fn young_constant(triple: &ExponentTriple) -> f64 {
    let e = (2.0 / triple.p - 1.0) + (2.0 / triple.q - 1.0) + (2.0 / triple.r - 1.0);
    std::f64::consts::SQRT_2.powf(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    HausdorffYoung,
    Young,
    BanachL1,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::HausdorffYoung => "hausdorff_young",
            InequalityKind::Young => "young",
            InequalityKind::BanachL1 => "banach_l1",
        })
    }
}

/// Both sides of one inequality trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    /// `[p, q, r]`; unused slots are `None`.
    pub exponents: [Option<f64>; 3],
    pub lhs: f64,
    pub constant: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `lhs` against the prior constant 4, where applicable.
    pub prior_ratio: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub witness_ids: Vec<String>,
}

impl InequalityReport {
    pub(crate) fn new(
        kind: InequalityKind,
        exponents: [Option<f64>; 3],
        lhs: f64,
        constant: f64,
        rhs: f64,
        prior_rhs: Option<f64>,
        tol: f64,
    ) -> Self {
        let ratio = side_ratio(lhs, rhs);
        InequalityReport {
            kind,
            exponents,
            lhs,
            constant,
            rhs,
            ratio,
            prior_ratio: prior_rhs.map(|prior| side_ratio(lhs, prior)),
            tol,
            pass: ratio <= 1.0 + tol,
            witness_ids: Vec::new(),
        }
    }

    pub fn with_witnesses(mut self, ids: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.witness_ids = ids.into_iter().map(Into::into).collect();
        self
    }
}

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = inf`.
fn side_ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn convolve(plan: &TransformPlan, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    let spectrum = plan.forward(f)?.product(&plan.forward(g)?)?;
    plan.inverse(&spectrum)
}

/// `||H(f * g) - H f . H g||_2 / (||H f . H g||_2 + eps)`.
pub fn factorization_residual(plan: &TransformPlan, f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    let product = plan.forward(f)?.product(&plan.forward(g)?)?;
    let again = plan.forward(&plan.inverse(&product)?)?;
    let defect = again.combine(1.0, &product, -1.0)?.lp_norm(2.0)?;
    Ok(defect / (product.lp_norm(2.0)? + f64::EPSILON))
}

/// Checks `||f * g||_{r'} <= C_{p,q,r} ||f||_p ||g||_q`.
pub fn check_young(
    plan: &TransformPlan,
    f: &SampledFunction,
    g: &SampledFunction,
    triple: &ExponentTriple,
    tol: f64,
) -> Result<InequalityReport> {
    let lhs = lp_norm(&convolve(plan, f, g)?, triple.r1)?;
    let norms = lp_norm(f, triple.p)? * lp_norm(g, triple.q)?;
    let constant = young_constant(triple);
    Ok(InequalityReport::new(
        InequalityKind::Young,
        [Some(triple.p), Some(triple.q), Some(triple.r)],
        lhs,
        constant,
        constant * norms,
        Some(PRIOR_CONSTANT * norms),
        tol,
    ))
}

/// Checks `||f * g||_1 <= 4 ||f||_1 ||g||_1`.
pub fn check_banach_l1(
    plan: &TransformPlan,
    f: &SampledFunction,
    g: &SampledFunction,
    tol: f64,
) -> Result<InequalityReport> {
    let lhs = lp_norm(&convolve(plan, f, g)?, 1.0)?;
    let rhs = PRIOR_CONSTANT * lp_norm(f, 1.0)? * lp_norm(g, 1.0)?;
    Ok(InequalityReport::new(
        InequalityKind::BanachL1,
        [Some(1.0), Some(1.0), None],
        lhs,
        PRIOR_CONSTANT,
        rhs,
        None,
        tol,
    ))
}

/// `||(f * g) * h - f * (g * h)||_1 / (||f * (g * h)||_1 + eps)`.
pub fn check_associativity(
    plan: &TransformPlan,
    f: &SampledFunction,
    g: &SampledFunction,
    h: &SampledFunction,
) -> Result<f64> {
    let left = convolve(plan, &convolve(plan, f, g)?, h)?;
    let right = convolve(plan, f, &convolve(plan, g, h)?)?;
    let defect = lp_norm(&left.combine(1.0, &right, -1.0)?, 1.0)?;
    Ok(defect / (lp_norm(&right, 1.0)? + f64::EPSILON))
}
