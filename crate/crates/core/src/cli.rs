//! Command-line front end. `run` parses arguments, executes one subcommand and
//! returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{run_suite, Suite, SweepTolerances};
use crate::convolution::{convolve, SUP_NORM_TOL};
use crate::error::{Error, Result};
use crate::io;
use crate::quadrature::{FunctionSpec, GridSpec, QuadratureGrid, SampledFunction, Scheme};
use crate::solver::{check_apriori_bound, solve_integral_equation, SolverConfig};
use crate::special_functions::KernelParams;
use crate::transform::{round_trip_error, TransformPlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;
pub const EXIT_BOUND_FAILED: i32 = 5;
pub const EXIT_NOT_SOLVABLE: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "hartley-bessel",
    version,
    about = "Hartley–Bessel transforms, convolutions, inequality sweeps and integral equations"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Grid, seed, tolerances and output options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Order parameter of the kernel and measure.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,
    /// Truncation radius R of [-R, R].
    #[arg(long, global = true, default_value_t = 12.0)]
    pub radius: f64,
    /// Number of panels on [-R, R].
    #[arg(long, global = true, default_value_t = 400)]
    pub panels: usize,
    /// Quadrature points per panel.
    #[arg(long, global = true, default_value_t = 3)]
    pub points: usize,
    /// `gauss-legendre` (alias `gl`) or `trapezoid`.
    #[arg(long, global = true, default_value = "gauss-legendre")]
    pub scheme: Scheme,
    /// Seed of the certification sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Term budget of each Bessel series.
    #[arg(long, global = true, default_value_t = KernelParams::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Relative L2 round-trip error above which `transform` warns.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub tol_round_trip: f64,
    /// Ratio slack for finite-exponent inequalities.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_inequality: f64,
    /// Ratio slack when the left-hand side is a sup norm.
    #[arg(long, global = true, default_value_t = SUP_NORM_TOL)]
    pub tol_sup: f64,
    /// Solver residual bound, relative to the right-hand side's L1 norm.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_residual: f64,
    /// Smallest admissible |1 + H g| on the frequency grid.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_denom: f64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            alpha: self.alpha,
            radius: self.radius,
            panels: self.panels,
            points_per_panel: self.points,
            scheme: self.scheme,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol-round-trip", self.tol_round_trip),
            ("tol-inequality", self.tol_inequality),
            ("tol-sup", self.tol_sup),
            ("tol-residual", self.tol_residual),
            ("tol-denom", self.tol_denom),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::config("--jobs must be at least 1"));
        }
        Ok(())
    }

    /// Kernel matrix for `grid` with this run's series limits.
    pub fn plan(&self, grid: &Arc<QuadratureGrid>) -> Result<TransformPlan> {
        let params = KernelParams::with_limits(grid.alpha(), KernelParams::DEFAULT_SERIES_TOL, self.max_terms)?;
        TransformPlan::build(grid, params)
    }

    fn sweep_tolerances(&self) -> SweepTolerances {
        SweepTolerances { finite: self.tol_inequality, sup: self.tol_sup }
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig { denom_threshold: self.tol_denom, residual_tol: self.tol_residual }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print grid nodes and weights.
    Grid,
    /// Forward transform of one function.
    Transform {
        /// `family:params` or `@path.csv`.
        #[arg(long, allow_hyphen_values = true)]
        family: String,
    },
    /// Convolution of two functions.
    Convolve {
        /// First factor, as a function spec or `@path.csv`.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Second factor.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Seeded inequality sweep.
    Certify {
        /// `hausdorff_young`, `young` or `banach_l1`.
        #[arg(long)]
        suite: String,
        /// Number of seeded trials.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Solve f + f * g = g * h.
    Solve {
        /// Kernel of the equation.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        /// Data term convolved with `g` on the right-hand side.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        /// Extra exponent triple `p,q,r` for the general a-priori bound.
        #[arg(long)]
        triple: Option<String>,
        /// Directory receiving `f.csv` and `l.csv`.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

/// Exit code for a failure.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_non_convergence() {
        return EXIT_NON_CONVERGENCE;
    }
    match err {
        Error::InvalidConfig(_) | Error::InvalidExponent(_) | Error::GridMismatch | Error::ReportNotSolvable => {
            EXIT_CONFIG
        }
        Error::Parse { .. } => EXIT_PARSE,
        _ => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let cfg = &cli.config;
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = &cli.config;
    let grid = cfg.grid_spec().build()?;
    match &cli.command {
        Command::Grid => {
            let body = match cfg.format {
                OutputFormat::Csv => io::grid_to_csv(&grid),
                OutputFormat::Json => io::json_string(&io::grid_to_json(&grid)),
            };
            emit(cfg, &body)?;
            Ok(EXIT_OK)
        }
        Command::Transform { family } => {
            let f = load_function(family, "family", &grid)?;
            let plan = cfg.plan(&grid)?;
            let spectrum = plan.forward(&f)?;
            let err = round_trip_error(&plan, &f)?;
            if err > cfg.tol_round_trip {
                eprintln!("warning: relative round-trip error {err:e} exceeds {:e}", cfg.tol_round_trip);
            }
            warn_decay("input", &f);
            let body = match cfg.format {
                OutputFormat::Csv => io::spectral_to_csv(&spectrum),
                OutputFormat::Json => io::json_string(&io::spectral_to_json(&spectrum)),
            };
            emit(cfg, &body)?;
            Ok(EXIT_OK)
        }
        Command::Convolve { f, g } => {
            let f = load_function(f, "f", &grid)?;
            let g = load_function(g, "g", &grid)?;
            let plan = cfg.plan(&grid)?;
            let conv = convolve(&plan, &f, &g)?;
            let body = match cfg.format {
                OutputFormat::Csv => io::sampled_to_csv(&conv),
                OutputFormat::Json => io::json_string(&io::sampled_to_json(&conv)),
            };
            emit(cfg, &body)?;
            Ok(EXIT_OK)
        }
        Command::Certify { suite, trials } => {
            let suite: Suite = suite.parse()?;
            if *trials == 0 {
                return Err(Error::config("--trials must be at least 1"));
            }
            let plan = cfg.plan(&grid)?;
            let tol = cfg.sweep_tolerances();
            let run = run_suite(&plan, suite, *trials, cfg.seed, tol)?;
            let body = match cfg.format {
                OutputFormat::Csv => io::certification_to_csv(&run),
                OutputFormat::Json => io::json_string(&io::certification_to_json(&run, &grid, &tol)),
            };
            emit(cfg, &body)?;
            let failures = run.rows.iter().filter(|r| !r.pass).count();
            eprintln!("{suite}: {} rows, max ratio {:.6e}, {failures} failure(s)", run.rows.len(), run.max_ratio());
            Ok(if run.all_pass() { EXIT_OK } else { EXIT_BOUND_FAILED })
        }
        Command::Solve { g, h, triple, dump } => {
            let triple = triple.as_deref().map(parse_triple).transpose()?;
            let g = load_function(g, "g", &grid)?;
            let h = load_function(h, "h", &grid)?;
            let plan = cfg.plan(&grid)?;
            let report = solve_integral_equation(&plan, &g, &h, &cfg.solver_config())?;
            let apriori =
                if report.solvable { Some(check_apriori_bound(&report, triple, cfg.tol_inequality)?) } else { None };
            let body = match cfg.format {
                OutputFormat::Csv => io::solver_report_to_csv(&report, apriori.as_ref()),
                OutputFormat::Json => io::json_string(&io::solver_report_to_json(&report, apriori.as_ref(), &grid)),
            };
            emit(cfg, &body)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if !report.solvable {
                eprintln!(
                    "not solvable: min |1 + Hg| = {:e} at lambda = {} (threshold {:e})",
                    report.min_denominator, report.min_denominator_lambda, cfg.tol_denom
                );
                return Ok(EXIT_NOT_SOLVABLE);
            }
            if let Some(dir) = dump {
                std::fs::create_dir_all(dir)?;
                if let (Some(f), Some(l)) = (&report.solution_f, &report.multiplier_l) {
                    std::fs::write(dir.join("f.csv"), io::sampled_to_csv(f))?;
                    std::fs::write(dir.join("l.csv"), io::sampled_to_csv(l))?;
                }
            }
            let bounds_hold = apriori.as_ref().is_some_and(|a| a.all_hold());
            if !report.residual_ok() || !bounds_hold {
                eprintln!(
                    "check failed: relative residual {:e} (tolerance {:e}), a-priori bounds hold: {bounds_hold}",
                    report.relative_residual(),
                    cfg.tol_residual
                );
                return Ok(EXIT_BOUND_FAILED);
            }
            Ok(EXIT_OK)
        }
    }
}

fn input_error(flag: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: PathBuf::from(format!("--{flag}")), message: message.into() }
}

/// Resolves a `family:params` spec or an `@path.csv` file onto `grid`.
pub fn load_function(arg: &str, flag: &str, grid: &Arc<QuadratureGrid>) -> Result<SampledFunction> {
    if let Some(path) = arg.strip_prefix('@') {
        let path = Path::new(path);
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })?;
        return io::sampled_from_csv(&text, path, grid);
    }
    let spec: FunctionSpec = arg.parse().map_err(|e: Error| input_error(flag, e.to_string()))?;
    spec.sample(grid)
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| input_error("triple", format!("bad exponent `{v}`"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [p, q, r] => Ok((p, q, r)),
        _ => Err(input_error("triple", format!("expected `p,q,r`, got `{s}`"))),
    }
}

fn warn_decay(name: &str, f: &SampledFunction) {
    let d = f.decay();
    if !d.ok {
        eprintln!("warning: {name} has not decayed at the truncation boundary (ratio {:e})", d.ratio);
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
