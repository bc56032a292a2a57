//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a validation suite reports a failure,
//! 2 on a usage error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{classify_exponent, discrepancy_record, sweep, validate_grid};
use crate::error::Error;
use crate::hardy::{build_scheme, theorem2_check, transform_report, OrderRule, PartSelector, Selectors};
use crate::lattice_count::{count_a, BodyParams, CountMethod, PolicyMode, ScalarPolicy, DEFAULT_GUARD_EPS};
use crate::output::{records_to_csv, to_json};
use crate::special_fn::SeriesConfig;
use crate::vaaler::check_bound;

pub const WORKERS_ENV: &str = "LATDISC_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "latdisc", version, about = "Lattice points in Lamé discs and the bodies |u1|^(mk) + (|u2|^k + |u3|^k)^m <= x^(mk)")]
pub struct RunConfig {
    /// Worker threads (falls back to $LATDISC_WORKERS, then all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count lattice points A_{m,k}(x).
    Count {
        #[command(flatten)]
        body: BodyArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Sliced)]
        method: MethodArg,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// One discrepancy record as JSON.
    Disc {
        #[command(flatten)]
        body: BodyArgs,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Discrepancy records over a grid of x.
    Sweep {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Truncated Hardy identity check for Delta_k(W).
    Hardy {
        #[arg(long)]
        k: f64,
        #[arg(long = "w")]
        w: f64,
        #[arg(long, default_value_t = 0.47)]
        lambda: f64,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, value_enum, default_value_t = PartArg::NegImag)]
        alpha_part: PartArg,
        #[arg(long, value_enum, default_value_t = PartArg::Real)]
        beta_part: PartArg,
    },
    /// Check Vaaler's two-sided bound on random points.
    Vaaler {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3, 5, 8, 16, 64, 256])]
        orders: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compare direct and transformed exponential sums on each dyadic level.
    Transform {
        #[arg(long)]
        k: f64,
        #[arg(long = "w")]
        w: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[command(flatten)]
        order: OrderArgs,
    },
    /// Predicted remainder exponent as JSON.
    Classify {
        #[command(flatten)]
        body: BodyArgs,
    },
}

#[derive(Debug, Args)]
pub struct BodyArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub k: f64,
    /// Accept m >= 1, k >= 2 (counting only).
    #[arg(long)]
    pub relaxed: bool,
}

impl BodyArgs {
    fn params(&self) -> Result<BodyParams, Error> {
        if self.relaxed {
            BodyParams::relaxed(self.m, self.k)
        } else {
            BodyParams::new(self.m, self.k)
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Sliced,
    Brute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    #[arg(long, value_enum, default_value_t = PolicyArg::Auto)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = DEFAULT_GUARD_EPS)]
    pub guard_eps: f64,
}

impl PolicyArgs {
    fn policy(&self, p: &BodyParams) -> ScalarPolicy {
        let mut pol = match self.policy {
            PolicyArg::Auto => ScalarPolicy::for_body(p),
            PolicyArg::Exact => ScalarPolicy::exact(),
            PolicyArg::Float => ScalarPolicy::guarded(self.guard_eps),
        };
        if pol.mode == PolicyMode::GuardedFloat {
            pol.guard_eps = self.guard_eps;
        }
        pol
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
}

impl SeriesArgs {
    fn config(&self) -> SeriesConfig {
        SeriesConfig { n_max: self.n_max, ..SeriesConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit comma-separated grid.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["x_min", "x_max", "points"])]
    pub grid: Option<Vec<f64>>,
    #[arg(long, requires_all = ["x_max", "points"])]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
}

impl GridArgs {
    fn build(&self) -> Result<Vec<f64>, Error> {
        let grid = match (&self.grid, self.x_min, self.x_max, self.points) {
            (Some(g), ..) => g.clone(),
            (None, Some(lo), Some(hi), Some(n)) => make_grid(lo, hi, n, self.spacing)?,
            _ => return Err(Error::Usage("sweep needs --grid or --x-min/--x-max/--points".into())),
        };
        validate_grid(&grid)?;
        Ok(grid)
    }
}

/// `n` points from `lo` to `hi` inclusive.
pub fn make_grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>, Error> {
    if n == 0 {
        return Err(Error::Usage("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Usage(format!("grid needs 0 < x-min < x-max, got {lo}, {hi}")));
    }
    let step = 1.0 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match spacing {
            Spacing::Log => lo * (hi / lo).powf(i as f64 * step),
            Spacing::Linear => lo + (hi - lo) * i as f64 * step,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    /// Vaaler order rule: `quarter` (ceil W^(1/4)), `balanced`, a fixed
    /// integer, or a comma-separated list with one order per level.
    #[arg(long, default_value = "quarter")]
    pub order: String,
}

impl OrderArgs {
    fn rule(&self) -> Result<OrderRule, Error> {
        self.order.parse()
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PartArg {
    Real,
    Imag,
    NegImag,
}

impl From<PartArg> for PartSelector {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Real => PartSelector::Real,
            PartArg::Imag => PartSelector::Imag,
            PartArg::NegImag => PartSelector::NegImag,
        }
    }
}

enum Outcome {
    Ok(String),
    /// Output is still written, but the run reports a validation failure
    /// with the given message.
    Failed(String, String),
}

fn json<T: Serialize>(v: &T) -> Outcome {
    Outcome::Ok(to_json(v))
}

fn execute(cmd: &Command) -> Result<Outcome, Error> {
    Ok(match cmd {
        Command::Count { body, x, method, policy } => {
            let p = body.params()?;
            let method = match method {
                MethodArg::Sliced => CountMethod::Sliced,
                MethodArg::Brute => CountMethod::BruteForce,
            };
            let c = count_a(&p, *x, &policy.policy(&p), method)?;
            if c.ambiguous > 0 {
                Outcome::Failed(format!("{}\n", c.count), format!("{} boundary points could not be resolved", c.ambiguous))
            } else {
                Outcome::Ok(format!("{}\n", c.count))
            }
        }
        Command::Disc { body, x, policy, series } => {
            let p = body.params()?;
            json(&discrepancy_record(&p, *x, &policy.policy(&p), &series.config())?)
        }
        Command::Sweep { body, grid, policy, series, format } => {
            let p = body.params()?;
            let grid = grid.build()?;
            let records = sweep(&p, &grid, &policy.policy(&p), &series.config())?;
            match format {
                FormatArg::Csv => Outcome::Ok(records_to_csv(&records)),
                FormatArg::Json => json(&records),
            }
        }
        Command::Hardy { k, w, lambda, order, alpha_part, beta_part } => {
            let sel = Selectors { alpha: (*alpha_part).into(), beta: (*beta_part).into() };
            let e = theorem2_check(*k, *w, *lambda, &order.rule()?, sel)?;
            if e.c_emp.is_finite() {
                json(&e)
            } else {
                Outcome::Failed(to_json(&e), "empirical constant is not finite".into())
            }
        }
        Command::Vaaler { orders, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let points: Vec<f64> = (0..*samples).map(|_| rng.random_range(-100.0..100.0)).collect();
            let checks = orders.iter().map(|&h| check_bound(h, &points, 1e-12)).collect::<Result<Vec<_>, _>>()?;
            let violations: usize = checks.iter().map(|c| c.violations).sum();
            if violations > 0 {
                Outcome::Failed(to_json(&checks), format!("{violations} bound violations"))
            } else {
                json(&checks)
            }
        }
        Command::Transform { k, w, lambda, order } => {
            let s = build_scheme(*k, *w, *lambda, 1.0, &order.rule()?)?;
            json(&transform_report(&s)?)
        }
        Command::Classify { body } => json(&classify_exponent(&body.params()?)?),
    })
}

/// Worker count from the flag, the environment, or the machine.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.filter(|&n| n > 0)
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(resolve_workers(cfg.workers)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let result = pool.install(|| execute(&cfg.command));
    let (text, code) = match result {
        Ok(Outcome::Ok(t)) => (t, 0),
        Ok(Outcome::Failed(t, msg)) => {
            let _ = writeln!(err, "validation failed: {msg}");
            (t, 1)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                Error::Usage(_) | Error::Domain(_) => 2,
                Error::Row { ref source, .. } if matches!(**source, Error::Usage(_) | Error::Domain(_)) => 2,
                _ => 1,
            };
        }
    };
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => {
            let _ = write!(out, "{text}");
        }
    }
    code
}
