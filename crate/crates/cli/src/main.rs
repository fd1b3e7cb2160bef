use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ttolab::{DashboardOptions, InnerFunction};

mod commands;
mod parse;

/// Numerical experiments on model spaces, truncated Toeplitz operators,
/// Clark measures and bounded factorizations.
#[derive(Parser)]
#[command(name = "ttolab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Inner function: `z^n`, `B[a1,a2,...]` or `@file.json`.
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Number of equispaced nodes on the circle.
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override a tolerance, e.g. `--tol residual=1e-8`. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Inner functions.
    #[command(subcommand)]
    Inner(InnerCmd),
    /// Clark measures.
    #[command(subcommand)]
    Clark(ClarkCmd),
    /// Truncated Toeplitz operators.
    #[command(subcommand)]
    Tto(TtoCmd),
    /// Embeddings of the model space into L²(μ).
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Factorization of products.
    #[command(subcommand)]
    Factor(FactorCmd),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
}

#[derive(Subcommand)]
enum InnerCmd {
    /// Zeros, front factor and optionally a value at a point.
    Info {
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Connected components of {|θ| < ε}.
    Sublevel {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 256)]
        res: usize,
    },
}

#[derive(Subcommand)]
enum ClarkCmd {
    /// Atoms and weights of σ_α.
    Measure {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Union of the Clark atoms for α = ±1.
    Partition,
}

#[derive(Subcommand)]
enum TtoCmd {
    /// Compress a Laurent polynomial symbol such as `z + 2*zbar^2`.
    Build {
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
    },
    /// A basis of the space of truncated Toeplitz operators.
    Basis,
    /// Fit a nonnegative measure whose compression matches an operator.
    Quasisymbol {
        #[arg(long, conflicts_with = "measure", allow_hyphen_values = true)]
        symbol: Option<String>,
        #[arg(long)]
        measure: Option<String>,
    },
}

#[derive(Args, Clone)]
struct DashboardArgs {
    #[arg(long, default_value_t = 500)]
    pairs: usize,
    #[arg(long, default_value_t = 100)]
    pp_trials: usize,
    #[arg(long, default_value_t = 3)]
    factor_trials: usize,
}

impl DashboardArgs {
    fn options(&self, seed: u64) -> DashboardOptions {
        DashboardOptions {
            seed,
            pairs: self.pairs,
            pp_trials: self.pp_trials,
            factor_trials: self.factor_trials,
        }
    }
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Embedding constant, with a power-iteration cross-check.
    Norm {
        /// `m`, `sigma:ALPHA`, `dirac:ANGLE[:WEIGHT]`, `atoms:K` or `@file`.
        #[arg(long)]
        measure: Vec<String>,
    },
    /// The full table of embedding constants.
    Dashboard {
        #[arg(long)]
        measure: Vec<String>,
        #[command(flatten)]
        dash: DashboardArgs,
    },
    /// Intertwining of the embedding with the compressed shift.
    Commutator {
        #[arg(long)]
        measure: Vec<String>,
    },
}

#[derive(Subcommand)]
enum FactorCmd {
    /// Write f as a sum of at most four products.
    Run {
        #[arg(long, conflicts_with = "f")]
        random_f: bool,
        /// Analytic polynomial in z, sampled on the grid.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
    },
    /// Two-sided bounds on the norm of h in the product space.
    Xnorm {
        #[arg(long, conflicts_with = "h")]
        random_h: bool,
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
    },
    /// Factor a random Paley–Wiener function.
    Pw {
        #[arg(long)]
        random_f: bool,
        #[arg(long, default_value_t = 32)]
        window: usize,
    },
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Factorization constants of random polynomials on z^(n+1), n doubling.
    Volberg {
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Dashboard rows for z^n against m and σ₁, n doubling.
    Dashboard {
        #[arg(long, default_value_t = 16)]
        nmax: usize,
        #[command(flatten)]
        dash: DashboardArgs,
    },
}

/// Tolerance names accepted by `--tol` and their defaults.
const TOLERANCES: &[(&str, f64)] = &[
    ("sarason", 1e-9),
    ("isometry", 1e-9),
    ("commutator", 1e-9),
    ("quasisymbol", 1e-7),
    ("residual", 1e-6),
    ("pw_residual", 1e-4),
];

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    if !TOLERANCES.iter().any(|(n, _)| *n == name) {
        let known: Vec<&str> = TOLERANCES.iter().map(|(n, _)| *n).collect();
        return Err(format!("unknown tolerance `{name}`; known: {}", known.join(", ")));
    }
    let v: f64 = value.parse().map_err(|_| format!("bad value `{value}`"))?;
    if !(v > 0.0) {
        return Err("tolerance must be positive".into());
    }
    Ok((name.to_string(), v))
}

#[derive(Clone)]
pub struct RunConfig {
    theta: Option<String>,
    pub grid: usize,
    pub seed: u64,
    tol: Vec<(String, f64)>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn theta(&self) -> Result<InnerFunction, CliError> {
        let src = self.theta.as_deref().ok_or_else(|| CliError::Usage("--theta is required".into()))?;
        parse::theta(src).map_err(CliError::Usage)
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tol
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or_else(|| TOLERANCES.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
            .expect("tolerance name is registered")
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Tolerance(String),
    Numeric(String),
}

impl From<ttolab::Error> for CliError {
    fn from(e: ttolab::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<commands::Report, CliError> {
    use commands::*;
    match cmd {
        Command::Inner(InnerCmd::Info { at }) => inner_info(cfg, at.as_deref()),
        Command::Inner(InnerCmd::Sublevel { eps, res }) => inner_sublevel(cfg, *eps, *res),
        Command::Clark(ClarkCmd::Measure { alpha }) => clark_run(cfg, alpha),
        Command::Clark(ClarkCmd::Partition) => clark_partition(cfg),
        Command::Tto(TtoCmd::Build { symbol }) => tto_build(cfg, symbol),
        Command::Tto(TtoCmd::Basis) => tto_basis(cfg),
        Command::Tto(TtoCmd::Quasisymbol { symbol, measure }) => {
            tto_quasisymbol(cfg, symbol.as_deref(), measure.as_deref())
        }
        Command::Embed(EmbedCmd::Norm { measure }) => embed_norm(cfg, measure),
        Command::Embed(EmbedCmd::Dashboard { measure, dash }) => embed_dashboard(cfg, measure, dash.options(cfg.seed)),
        Command::Embed(EmbedCmd::Commutator { measure }) => embed_commutator(cfg, measure),
        Command::Factor(FactorCmd::Run { random_f, f }) => factor_run(cfg, *random_f, f.as_deref()),
        Command::Factor(FactorCmd::Xnorm { random_h, h }) => factor_xnorm(cfg, *random_h, h.as_deref()),
        Command::Factor(FactorCmd::Pw { random_f, window }) => {
            if !random_f {
                return Err(CliError::Usage("`factor pw` currently takes only --random-f".into()));
            }
            factor_pw(cfg, *window)
        }
        Command::Sweep(SweepCmd::Volberg { nmax, trials }) => sweep_volberg(cfg, *nmax, *trials),
        Command::Sweep(SweepCmd::Dashboard { nmax, dash }) => sweep_dashboard(cfg, *nmax, dash.options(cfg.seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let g = cli.global;
    let cfg = RunConfig {
        theta: g.theta,
        grid: g.grid,
        seed: g.seed,
        tol: g.tol,
        format: g.format,
    };
    let report = match dispatch(&cli.command, &cfg) {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(CliError::Tolerance(msg)) => {
            eprintln!("tolerance failure: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut body = report.body;
    body.push('\n');
    let written = match &g.out {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    eprintln!("{}", report.summary);
    ExitCode::SUCCESS
}
