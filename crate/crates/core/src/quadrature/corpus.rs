//! Deterministic test functions and the `family:param[,param...]` grammar.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{QuadratureGrid, SampledFunction};
use crate::error::{Error, Result};

/// Gaussian envelope width of `random_bandlimited` functions.
const BANDLIMITED_ENVELOPE: f64 = 1.25;
/// Largest carrier frequency of `random_bandlimited` functions.
const BANDLIMITED_MAX_FREQUENCY: f64 = 3.0;
const MAX_BANDS: f64 = 64.0;
const MAX_HERMITE_DEGREE: f64 = 100.0;
const MAX_EXACT_INTEGER: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFamily {
    /// `exp(-(x/a)^2)`; params `[a]`.
    Gaussian,
    /// `exp(k - k/(1 - (x/s)^2))` on `|x| < s`, zero outside; params `[s]` or `[s, k]` (k defaults to 1).
    Bump,
    /// Normalized Hermite function `H_n(x) exp(-x^2/2) / sqrt(2^n n!)`; params `[n]`.
    HermiteGaussian,
    /// Gaussian-windowed sum of seeded random cosines and sines; params `[seed, bands]`.
    RandomBandlimited,
    /// Identically zero; no params.
    Zero,
}

impl TestFamily {
    pub const ALL: [TestFamily; 5] = [
        TestFamily::Gaussian,
        TestFamily::Bump,
        TestFamily::HermiteGaussian,
        TestFamily::RandomBandlimited,
        TestFamily::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFamily::Gaussian => "gaussian",
            TestFamily::Bump => "bump",
            TestFamily::HermiteGaussian => "hermite_gaussian",
            TestFamily::RandomBandlimited => "random_bandlimited",
            TestFamily::Zero => "zero",
        }
    }
}

impl FromStr for TestFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::config(format!("unknown function family `{s}`")))
    }
}

/// Samples a corpus function on `grid`.
pub fn make_test_function(family: TestFamily, params: &[f64], grid: &Arc<QuadratureGrid>) -> Result<SampledFunction> {
    let arity_error =
        |want: &str| Error::config(format!("{} expects {want}, got {} parameter(s)", family.name(), params.len()));
    match family {
        TestFamily::Gaussian => {
            let [width] = params else { return Err(arity_error("1 parameter (width)")) };
            let width = positive(*width, "gaussian width")?;
            SampledFunction::from_fn(grid, |x| (-(x / width).powi(2)).exp())
        }
        TestFamily::Bump => {
            let (half_width, sharpness) = match params {
                [s] => (*s, 1.0),
                [s, k] => (*s, *k),
                _ => return Err(arity_error("1 or 2 parameters (half-width[, sharpness])")),
            };
            let s = positive(half_width, "bump half-width")?;
            let k = positive(sharpness, "bump sharpness")?;
            SampledFunction::from_fn(grid, |x| {
                let u = x / s;
                if u.abs() < 1.0 {
                    (k - k / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            })
        }
        TestFamily::HermiteGaussian => {
            let [degree] = params else { return Err(arity_error("1 parameter (degree)")) };
            let n = integer(*degree, 0.0, MAX_HERMITE_DEGREE, "hermite degree")? as usize;
            SampledFunction::from_fn(grid, |x| hermite_function(n, x))
        }
        TestFamily::RandomBandlimited => {
            let [seed, bands] = params else {
                return Err(arity_error("2 parameters (seed, bands)"));
            };
            let seed = integer(*seed, 0.0, MAX_EXACT_INTEGER, "seed")? as u64;
            let bands = integer(*bands, 1.0, MAX_BANDS, "band count")? as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let carriers: Vec<(f64, f64, f64)> = (0..bands)
                .map(|_| {
                    (rng.gen_range(0.0..BANDLIMITED_MAX_FREQUENCY), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
                .collect();
            let spread = 2.0 * BANDLIMITED_ENVELOPE * BANDLIMITED_ENVELOPE;
            SampledFunction::from_fn(grid, |x| {
                let wave: f64 = carriers
                    .iter()
                    .map(|&(omega, a, b)| {
                        let (s, c) = (omega * x).sin_cos();
                        a * c + b * s
                    })
                    .sum();
                (-x * x / spread).exp() * wave
            })
        }
        TestFamily::Zero => {
            if !params.is_empty() {
                return Err(arity_error("no parameters"));
            }
            Ok(SampledFunction::zeros(grid))
        }
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(format!("{what} must be positive, got {v}")))
    }
}

fn integer(v: f64, lo: f64, hi: f64, what: &str) -> Result<f64> {
    if v.fract() == 0.0 && v >= lo && v <= hi {
        Ok(v)
    } else {
        Err(Error::config(format!("{what} must be an integer in [{lo}, {hi}], got {v}")))
    }
}

/// Hermite function via the normalized three-term recurrence (no overflow for large n).
fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// A reproducible one-line function description: `[scale*]family[:p1,p2,...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub family: TestFamily,
    pub params: Vec<f64>,
    pub scale: f64,
}

impl FunctionSpec {
    pub fn new(family: TestFamily, params: Vec<f64>) -> Self {
        FunctionSpec { family, params, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn sample(&self, grid: &Arc<QuadratureGrid>) -> Result<SampledFunction> {
        let f = make_test_function(self.family, &self.params, grid)?;
        Ok(if self.scale == 1.0 { f } else { f.scaled(self.scale) })
    }

    /// A `random_bandlimited` spec with a seed and band count drawn from `rng`.
    pub fn random_bandlimited(rng: &mut impl Rng) -> Self {
        let seed = rng.gen_range(0..1u64 << 32) as f64;
        let bands = rng.gen_range(1..=8) as f64;
        FunctionSpec::new(TestFamily::RandomBandlimited, vec![seed, bands])
    }

    /// A corpus member whose family and parameters are drawn from `rng`.
    ///
    /// Parameter ranges keep both the function and its transform decayed
    /// below the boundary threshold on the default `R = 12` grid, and leave
    /// room for the support growth of a convolution.
    pub fn random_corpus(rng: &mut impl Rng) -> Self {
        let round = |v: f64| (v * 1000.0).round() / 1000.0;
        match rng.gen_range(0..4) {
            0 => FunctionSpec::new(TestFamily::Gaussian, vec![round(rng.gen_range(0.8..2.0))]),
            1 => FunctionSpec::new(
                TestFamily::Bump,
                vec![round(rng.gen_range(6.0..9.0)), round(rng.gen_range(6.0..10.0))],
            ),
            2 => FunctionSpec::new(TestFamily::HermiteGaussian, vec![rng.gen_range(0..=6) as f64]),
            _ => Self::random_bandlimited(rng),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale != 1.0 {
            write!(f, "{}*", self.scale)?;
        }
        f.write_str(self.family.name())?;
        for (i, p) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { ":" } else { "," })?;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (scale, rest) = match s.split_once('*') {
            Some((factor, rest)) => {
                let scale: f64 =
                    factor.trim().parse().map_err(|_| Error::config(format!("bad scale factor `{factor}`")))?;
                if !scale.is_finite() {
                    return Err(Error::config(format!("bad scale factor `{factor}`")));
                }
                (scale, rest.trim())
            }
            None => (1.0, s),
        };
        let (name, args) = match rest.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (rest, None),
        };
        let family: TestFamily = name.trim().parse()?;
        let params = match args {
            Some(args) => args
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| Error::config(format!("bad parameter `{a}` in `{s}`"))))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(FunctionSpec { family, params, scale })
    }
}
