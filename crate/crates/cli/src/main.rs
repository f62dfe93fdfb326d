//! `fracrb` command-line front end.

mod config;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;

/// Exit statuses.
const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "fracrb", version, about = "Reduced-basis fractional norms and operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Zolotarëv points and snapshot times.
    Points(RunFlags),
    /// Evaluate norms (and optionally the action) for each s.
    Apply(RunFlags),
    /// Error sweep over (s, r) against an oracle or a surrogate.
    Convergence(RunFlags),
    /// Run an invariant suite.
    Verify {
        /// One of specfun, zolotarev, linalg, equivalence, rbm, all.
        suite: String,
    },
}

/// Every key can also come from `--config`; flags win.
#[derive(Args, Debug, Default)]
pub struct RunFlags {
    /// `key = value` file with `#` comments.
    #[arg(long)]
    config: Option<String>,
    /// laplace1d, laplace2d, diagonal or matrixmarket.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Diagonal spectrum: comma list of λ², or `square:<upper>`.
    #[arg(long)]
    spectrum: Option<String>,
    /// Matrix Market files for the matrixmarket problem.
    #[arg(long)]
    mass: Option<String>,
    #[arg(long)]
    stiffness: Option<String>,
    /// Argument vector file, one value per line.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Number of active eigenmodes in a random argument.
    #[arg(long)]
    active: Option<String>,
    /// Comma list of fractional orders.
    #[arg(long)]
    s: Option<String>,
    /// Comma list or inclusive range `a:b`.
    #[arg(long)]
    r: Option<String>,
    /// Lower end of the spectral interval (a squared eigenvalue).
    #[arg(long = "lambda-l")]
    lambda_l: Option<String>,
    #[arg(long = "lambda-u")]
    lambda_u: Option<String>,
    /// Interval ratio; `points` then uses σ = [δ, 1].
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "rel-tol")]
    rel_tol: Option<String>,
    #[arg(long = "quad-tol")]
    quad_tol: Option<String>,
    /// oracle, surrogate or auto.
    #[arg(long)]
    truth: Option<String>,
    /// Field whose decay rate fills `fitted_rate`: norm or op.
    #[arg(long)]
    rate: Option<String>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
    /// `apply` only: CSV of the action vectors.
    #[arg(long = "vector-out")]
    vector_out: Option<String>,
}

impl RunFlags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("problem", &self.problem),
            ("n", &self.n),
            ("spectrum", &self.spectrum),
            ("mass", &self.mass),
            ("stiffness", &self.stiffness),
            ("u", &self.u),
            ("seed", &self.seed),
            ("active", &self.active),
            ("s", &self.s),
            ("r", &self.r),
            ("lambda-l", &self.lambda_l),
            ("lambda-u", &self.lambda_u),
            ("delta", &self.delta),
            ("rel-tol", &self.rel_tol),
            ("quad-tol", &self.quad_tol),
            ("truth", &self.truth),
            ("rate", &self.rate),
            ("out", &self.out),
            ("vector-out", &self.vector_out),
        ]
    }
}

/// Failure of a subcommand with its exit status.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VERIFY,
            message: message.into(),
        }
    }
}

impl From<fracrb::FracError> for Failure {
    fn from(e: fracrb::FracError) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FRACRB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("FRACRB_THREADS = {raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Points(flags) => run::points(&Settings::resolve(&flags)?),
        Command::Apply(flags) => run::apply(&Settings::resolve(&flags)?),
        Command::Convergence(flags) => run::convergence(&Settings::resolve(&flags)?),
        Command::Verify { suite } => run::verify(&suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = writeln!(std::io::stderr(), "error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
