//! `tmlab`: radial Trudinger–Moser solutions, blow-up diagnostics and
//! subcritical extremals on the unit disc, from the command line.
//!
//! Exit status is 0 on success, 1 for invalid arguments and 2 when a
//! solver fails. Errors are reported on stderr as a JSON object.

mod commands;
mod config;
mod emit;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "tmlab", version, about = "Trudinger–Moser numerics on the unit disc")]
struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    tuning: Tuning,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all subcommands; each mirrors a config key.
#[derive(Debug, Args)]
struct Tuning {
    /// Cap on worker threads for sweeps (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative tolerance of the shooting solve.
    #[arg(long, global = true)]
    bvp_tol: Option<f64>,
    #[arg(long, global = true)]
    extremal_tol: Option<f64>,
    /// Stopping tolerance of the Adimurthi–Druet fixed point.
    #[arg(long, global = true)]
    fp_tol: Option<f64>,
    #[arg(long, global = true)]
    alpha0_tol: Option<f64>,
    #[arg(long, global = true)]
    grid_intervals: Option<usize>,
    #[arg(long, global = true)]
    rescale_intervals: Option<usize>,
    #[arg(long, global = true)]
    green_intervals: Option<usize>,
    /// Comparison radius for the rescaled profiles.
    #[arg(long, global = true)]
    r_cmp: Option<f64>,
    /// Exponent of the decay diagnostic, in (0, 1).
    #[arg(long, global = true)]
    beta0: Option<f64>,
    #[arg(long, global = true)]
    damping: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Output file; defaults to stdout for CSV-only commands.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Dirichlet problem for one peak value.
    Bvp {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Shorthand for --bvp-tol.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sweep peak values and tabulate energies and profile errors.
    Family {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        c_list: Vec<f64>,
    },
    /// Tabulate the bubble and its second-order correction.
    Bubble {
        #[arg(long, default_value_t = 5.0)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Fit the c⁻⁴ energy coefficient from a family CSV.
    EnergyFit {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
    /// Subcritical extremal with the α-norm constraint.
    Extremal {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Subcritical Adimurthi–Druet extremal.
    ExtremalAd {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Radial Green function and the α₀ threshold.
    Green {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Full run: family, energy fit, diagnostics, Green function and
    /// both extremals, as one JSON document.
    Report {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
        c_list: Vec<f64>,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        eps: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Solver(tmlab::Error),
    Io(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Solver(e) if e.is_invalid_argument() => 1,
            CliError::Solver(_) | CliError::Io(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid-argument",
            CliError::Solver(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Io(m) => f.write_str(m),
            CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<tmlab::Error> for CliError {
    fn from(e: tmlab::Error) -> Self {
        CliError::Solver(e)
    }
}

fn report_error(err: &CliError) -> ExitCode {
    let obj = serde_json::json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "exit_code": err.exit_code(),
        }
    });
    eprint!("{}", emit::json_string(&obj));
    ExitCode::from(err.exit_code())
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let t = &cli.tuning;
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = t.$field { cfg.$field = v; })*
        };
    }
    apply!(
        threads,
        bvp_tol,
        extremal_tol,
        fp_tol,
        alpha0_tol,
        grid_intervals,
        rescale_intervals,
        green_intervals,
        r_cmp,
        beta0,
        damping,
        max_iter
    );
    if let Some(p) = &t.out {
        cfg.out = Some(p.clone());
    }
    if let Command::Bvp { tol: Some(tol), .. } = cli.command {
        cfg.bvp_tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;
    let sink = commands::Sink::open(cfg.out.as_deref())?;
    with_threads(cfg.threads, || commands::dispatch(&cli.command, &cfg, sink))
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool construction");
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R>(_n: usize, f: impl FnOnce() -> R) -> R {
    f()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_error(&CliError::invalid(e.to_string()));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
