//! Dense-matrix Hartley–Bessel transform on a self-dual quadrature grid.

use std::sync::Arc;

use rayon::prelude::*;

use crate::convolution::{InequalityKind, InequalityReport};
use crate::error::{Error, Result};
use crate::quadrature::{ensure_same_grid, lp_norm_of, QuadratureGrid, SampledFunction};
use crate::special_functions::{KernelEvaluator, KernelParams};

/// Transform values at the frequency nodes (which coincide with the spatial nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: Arc<QuadratureGrid>,
    values: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        SampledFunction::new(grid, values).map(SpectralFunction::from)
    }

    pub fn zeros(grid: &Arc<QuadratureGrid>) -> Self {
        SpectralFunction { grid: Arc::clone(grid), values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    /// Frequency nodes.
    pub fn lambdas(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralFunction {
        SpectralFunction { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise product on the frequency grid.
    pub fn product(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SpectralFunction { grid: Arc::clone(&self.grid), values })
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SpectralFunction, b: f64) -> Result<SpectralFunction> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(SpectralFunction { grid: Arc::clone(&self.grid), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of(&self.values, self.grid.mu_weights(), p)
    }
}

impl From<SampledFunction> for SpectralFunction {
    fn from(f: SampledFunction) -> Self {
        let grid = Arc::clone(f.grid());
        SpectralFunction { grid, values: f.into_values() }
    }
}

/// Precomputed kernel matrix `K[j][i] = J_{lambda_j}(x_i, alpha)`.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    grid: Arc<QuadratureGrid>,
    params: KernelParams,
    kernel: Vec<f64>,
}

impl TransformPlan {
    /// Plan with default series limits for the grid's `alpha`.
    pub fn for_grid(grid: &Arc<QuadratureGrid>) -> Result<Self> {
        Self::build(grid, KernelParams::new(grid.alpha())?)
    }

    /// Fills the kernel matrix, exploiting `K[j][i] = K[i][j]` and `K[-j][-i] = K[j][i]`.
    pub fn build(grid: &Arc<QuadratureGrid>, params: KernelParams) -> Result<Self> {
        if params.alpha != grid.alpha() {
            return Err(Error::config(format!(
                "kernel alpha {} differs from grid alpha {}",
                params.alpha,
                grid.alpha()
            )));
        }
        let evaluator = KernelEvaluator::new(&params)?;
        let nodes = grid.nodes();
        let n = nodes.len();
        let half = n / 2;
        // rows of the non-negative quadrant's upper triangle: (K(y), K(-y)) for y = x_j x_i >= 0
        let quadrant: Vec<Vec<(f64, f64)>> = (half..n)
            .into_par_iter()
            .map(|j| {
                (j..n)
                    .map(|i| {
                        evaluator.eval_pair(nodes[j] * nodes[i]).map_err(|e| Error::KernelEntry {
                            lambda: nodes[j],
                            x: nodes[i],
                            source: Box::new(e),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut kernel = vec![0.0; n * n];
        let mirror = |k: usize| n - 1 - k;
        for (row, j) in quadrant.iter().zip(half..n) {
            for (&(plus, minus), i) in row.iter().zip(j..n) {
                let (jm, im) = (mirror(j), mirror(i));
                for (a, b, v) in [(j, i, plus), (jm, im, plus), (jm, i, minus), (j, im, minus)] {
                    kernel[a * n + b] = v;
                    kernel[b * n + a] = v;
                }
            }
        }
        Ok(TransformPlan { grid: Arc::clone(grid), params, kernel })
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `K[j][i]`.
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.kernel[j * self.len() + i]
    }

    /// Row `j` of the kernel matrix (frequency `lambda_j`).
    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.len();
        &self.kernel[j * n..(j + 1) * n]
    }

    /// `out_j = sum_i K[j][i] w_i v_i`; rows are independent and summed in a fixed order.
    fn apply(&self, values: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = values.iter().zip(self.grid.mu_weights()).map(|(v, w)| v * w).collect();
        self.kernel
            .par_chunks(self.len().max(1))
            .map(|row| row.iter().zip(&weighted).map(|(k, v)| k * v).sum())
            .collect()
    }

    pub fn forward(&self, f: &SampledFunction) -> Result<SpectralFunction> {
        ensure_same_grid(&self.grid, f.grid())?;
        Ok(SpectralFunction { grid: Arc::clone(&self.grid), values: self.apply(f.values()) })
    }

    /// The transform is its own inverse, so this applies the same matrix.
    pub fn inverse(&self, spectrum: &SpectralFunction) -> Result<SampledFunction> {
        ensure_same_grid(&self.grid, spectrum.grid())?;
        Ok(SampledFunction::from_parts_unchecked(Arc::clone(&self.grid), self.apply(spectrum.values())))
    }
}

pub fn build_plan(grid: &Arc<QuadratureGrid>, params: KernelParams) -> Result<TransformPlan> {
    TransformPlan::build(grid, params)
}

pub fn forward_transform(plan: &TransformPlan, f: &SampledFunction) -> Result<SpectralFunction> {
    plan.forward(f)
}

pub fn inverse_transform(plan: &TransformPlan, spectrum: &SpectralFunction) -> Result<SampledFunction> {
    plan.inverse(spectrum)
}

/// `||H H f - f||_2 / ||f||_2`, or 0 for the zero function.
pub fn round_trip_error(plan: &TransformPlan, f: &SampledFunction) -> Result<f64> {
    let back = plan.inverse(&plan.forward(f)?)?;
    let norm = lp_norm_of(f.values(), f.grid().mu_weights(), 2.0)?;
    let diff = back.combine(1.0, f, -1.0)?;
    let err = lp_norm_of(diff.values(), f.grid().mu_weights(), 2.0)?;
    Ok(if norm > 0.0 { err / norm } else { err })
}

/// `| ||H f||_2 - ||f||_2 | / ||f||_2`, or 0 for the zero function.
pub fn plancherel_defect(plan: &TransformPlan, f: &SampledFunction) -> Result<f64> {
    let norm = lp_norm_of(f.values(), f.grid().mu_weights(), 2.0)?;
    let spectral = plan.forward(f)?.lp_norm(2.0)?;
    Ok(if norm > 0.0 { (spectral - norm).abs() / norm } else { spectral })
}

/// Conjugate exponent `p / (p - 1)`; infinite at `p = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(sqrt 2)^(2/p - 1)`.
pub fn hausdorff_young_constant(p: f64) -> f64 {
    std::f64::consts::SQRT_2.powf(2.0 / p - 1.0)
}

/// Checks `||H f||_{p'} <= (sqrt 2)^(2/p - 1) ||f||_p` for `p` in `[1, 2]`.
pub fn check_hausdorff_young(plan: &TransformPlan, f: &SampledFunction, p: f64, tol: f64) -> Result<InequalityReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::exponent(format!("Hausdorff-Young needs p in [1, 2], got {p}")));
    }
    let lhs = plan.forward(f)?.lp_norm(conjugate_exponent(p))?;
    let constant = hausdorff_young_constant(p);
    let rhs = constant * lp_norm_of(f.values(), f.grid().mu_weights(), p)?;
    Ok(InequalityReport::new(InequalityKind::HausdorffYoung, [Some(p), None, None], lhs, constant, rhs, None, tol))
}
