//! Symmetric quadrature grids for the weighted measure
//! `mu_alpha(dx) = |x|^(2 alpha) dx / (2^(alpha+1/2) Gamma(alpha+1/2))`
//! truncated to `[-R, R]`, plus integrals and `L^p_alpha` norms of sampled
//! functions.

mod corpus;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use corpus::{make_test_function, FunctionSpec, TestFamily};

/// Upper bound on `panels * points_per_panel` (the kernel matrix is dense).
pub const MAX_NODES: usize = 100_000;

/// Boundary decay threshold relative to the function's maximum magnitude.
pub const DECAY_THRESHOLD: f64 = 1e-10;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, 9 terms), with
/// reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series =
        LANCZOS_COEFFS[1..].iter().enumerate().fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64));
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * series
}

/// Normalization constant `c_alpha = 1 / (2^(alpha+1/2) Gamma(alpha+1/2))`.
pub fn measure_constant(alpha: f64) -> f64 {
    1.0 / ((alpha + 0.5).exp2() * gamma(alpha + 0.5))
}

/// Closed form of `mu_alpha([-R, R])`.
pub fn exact_mass(alpha: f64, radius: f64) -> f64 {
    measure_constant(alpha) * 2.0 * radius.powf(2.0 * alpha + 1.0) / (2.0 * alpha + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    GaussLegendre,
    Trapezoid,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::GaussLegendre => "gauss-legendre",
            Scheme::Trapezoid => "trapezoid",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss-legendre" | "gl" => Ok(Scheme::GaussLegendre),
            "trapezoid" => Ok(Scheme::Trapezoid),
            other => Err(Error::config(format!("unknown quadrature scheme `{other}`"))),
        }
    }
}

/// Parameters that fully determine a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alpha: f64,
    pub radius: f64,
    pub panels: usize,
    pub points_per_panel: usize,
    pub scheme: Scheme,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { alpha: 1.0, radius: 12.0, panels: 400, points_per_panel: 3, scheme: Scheme::GaussLegendre }
    }
}

impl GridSpec {
    /// Same grid with twice as many panels.
    pub fn refined(&self) -> GridSpec {
        GridSpec { panels: 2 * self.panels, ..*self }
    }

    pub fn build(&self) -> Result<Arc<QuadratureGrid>> {
        build_grid(self.alpha, self.radius, self.panels, self.points_per_panel, self.scheme).map(Arc::new)
    }
}

/// Nodes and `mu_alpha` weights on `[-R, R]`; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
    mu_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn radius(&self) -> f64 {
        self.spec.radius
    }

    pub fn scheme(&self) -> Scheme {
        self.spec.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mu_weights(&self) -> &[f64] {
        &self.mu_weights
    }

    /// Discrete `mu_alpha([-R, R])`.
    pub fn mass(&self) -> f64 {
        self.mu_weights.iter().sum()
    }
}

/// Builds a grid whose node set is closed under negation.
///
/// Composite Gauss-Legendre splits each half-line into `panels / 2` equal
/// panels so that 0 is always a panel boundary. Trapezoid uses
/// `panels * points_per_panel` equal intervals.
pub fn build_grid(
    alpha: f64,
    radius: f64,
    panels: usize,
    points_per_panel: usize,
    scheme: Scheme,
) -> Result<QuadratureGrid> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::config(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::config(format!("radius must be positive, got {radius}")));
    }
    if panels == 0 || points_per_panel == 0 {
        return Err(Error::config("panels and points per panel must be positive"));
    }
    let total = panels
        .checked_mul(points_per_panel)
        .filter(|&n| n <= MAX_NODES)
        .ok_or_else(|| Error::config(format!("panels x points exceeds {MAX_NODES}")))?;

    // positive half-line (x > 0), plus the weight of x = 0 when it is a node
    let (half_nodes, half_weights, centre) = match scheme {
        Scheme::GaussLegendre => {
            if !panels.is_multiple_of(2) {
                return Err(Error::config(format!(
                    "gauss-legendre needs an even panel count so 0 is a panel boundary, got {panels}"
                )));
            }
            let (t, w) = gauss_legendre(points_per_panel);
            let per_half = panels / 2;
            let h = radius / per_half as f64;
            let mut nodes = Vec::with_capacity(total / 2);
            let mut weights = Vec::with_capacity(total / 2);
            for k in 0..per_half {
                let lo = k as f64 * h;
                for (ti, wi) in t.iter().zip(&w) {
                    nodes.push(lo + 0.5 * h * (ti + 1.0));
                    weights.push(0.5 * h * wi);
                }
            }
            (nodes, weights, None)
        }
        Scheme::Trapezoid => {
            let step = 2.0 * radius / total as f64;
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            let centre = if total % 2 == 0 {
                let m = total / 2;
                for k in 1..=m {
                    nodes.push(radius * k as f64 / m as f64);
                    weights.push(if k == m { 0.5 * step } else { step });
                }
                Some(step)
            } else {
                for k in 0..=(total - 1) / 2 {
                    nodes.push(radius * (2 * k + 1) as f64 / total as f64);
                    weights.push(if 2 * k + 1 == total { 0.5 * step } else { step });
                }
                None
            };
            (nodes, weights, centre)
        }
    };

    let mut nodes = Vec::with_capacity(2 * half_nodes.len() + 1);
    let mut base = Vec::with_capacity(nodes.capacity());
    for (x, w) in half_nodes.iter().zip(&half_weights).rev() {
        nodes.push(-x);
        base.push(*w);
    }
    if let Some(w0) = centre {
        nodes.push(0.0);
        base.push(w0);
    }
    nodes.extend_from_slice(&half_nodes);
    base.extend_from_slice(&half_weights);

    let c = measure_constant(alpha);
    let mu_weights = nodes.iter().zip(&base).map(|(x, w)| w * c * x.abs().powf(2.0 * alpha)).collect();
    Ok(QuadratureGrid { spec: GridSpec { alpha, radius, panels, points_per_panel, scheme }, nodes, mu_weights })
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values of a real function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<QuadratureGrid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!("non-finite value at node {i}")));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: &Arc<QuadratureGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(Arc::clone(grid), values)
    }

    pub fn zeros(grid: &Arc<QuadratureGrid>) -> Self {
        SampledFunction { grid: Arc::clone(grid), values: vec![0.0; grid.len()] }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        SampledFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> SampledFunction {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        let values = self.values.iter().map(|&v| f(v)).collect();
        SampledFunction { grid: Arc::clone(&self.grid), values }
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SampledFunction, b: f64) -> Result<SampledFunction> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(SampledFunction { grid: Arc::clone(&self.grid), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn decay(&self) -> DecayReport {
        DecayReport::of(&self.values)
    }
}

/// Size of a function at the truncation boundary relative to its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub boundary_max: f64,
    pub overall_max: f64,
    pub ratio: f64,
    pub ok: bool,
}

impl DecayReport {
    pub fn of(values: &[f64]) -> DecayReport {
        let overall_max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let boundary_max = match (values.first(), values.last()) {
            (Some(a), Some(b)) => a.abs().max(b.abs()),
            _ => 0.0,
        };
        let ratio = if overall_max > 0.0 { boundary_max / overall_max } else { 0.0 };
        DecayReport { boundary_max, overall_max, ratio, ok: ratio <= DECAY_THRESHOLD }
    }
}

pub(crate) fn ensure_same_grid(a: &Arc<QuadratureGrid>, b: &Arc<QuadratureGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `sum_i f(x_i) w_i` with `w_i` the `mu_alpha` weights.
pub fn weighted_integral(f: &SampledFunction) -> f64 {
    f.values.iter().zip(f.grid.mu_weights()).map(|(v, w)| v * w).sum()
}

/// Discrete `L^p_alpha` norm. `p = f64::INFINITY` gives the maximum over nodes.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    lp_norm_of(f.values(), f.grid.mu_weights(), p)
}

pub(crate) fn lp_norm_of(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::exponent(format!("norm exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if p == 1.0 {
        return Ok(values.iter().zip(weights).map(|(v, w)| v.abs() * w).sum());
    }
    if p == 2.0 {
        return Ok(values.iter().zip(weights).map(|(v, w)| v * v * w).sum::<f64>().sqrt());
    }
    let sum: f64 = values.iter().zip(weights).map(|(v, w)| v.abs().powf(p) * w).sum();
    Ok(sum.powf(1.0 / p))
}
