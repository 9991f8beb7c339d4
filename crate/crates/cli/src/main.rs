#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::io::Usage;

/// Real-rooted polynomials in log space: profiles, roots, finite free convolutions, transforms.
#[derive(Parser, Debug)]
#[command(name = "profilekit", version, disable_help_flag = true, disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print help.
    #[arg(long, action = ArgAction::Help, global = true)]
    help: Option<bool>,
    /// Print version.
    #[arg(long, action = ArgAction::Version)]
    version: Option<bool>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a polynomial from a root generator and write it as JSON.
    Make(MakeArgs),
    /// Write the exponential profile as CSV (alpha,g,gprime_exp).
    Profile(ProfileArgs),
    /// Write the real roots as CSV.
    Roots(RootsArgs),
    /// Finite free or coefficientwise convolution of two polynomials.
    Conv(ConvArgs),
    /// Apply `z^a (d/dz)^b / n^b` repeatedly.
    Diff(DiffArgs),
    /// Sample G, R, S or psi on a grid.
    Transform(TransformArgs),
    /// Compare the empirical root law with a closed-form limit.
    Compare(CompareArgs),
    /// Run the acceptance experiments.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct Source {
    /// Polynomial JSON written by `make`, `conv` or `diff` (`-` for stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Root generator: uniform_grid:LO:HI, dirac:VALUE:COUNT, stirling, binomial, file:PATH.
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    pub roots: Option<String>,
    /// Degree parameter of the generator and normalization degree.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MakeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Generator T_{n,ell}^{(a,b)} given as N:ELL:A:B instead of a root generator.
    #[arg(long, conflicts_with_all = ["roots", "input"])]
    pub t_poly: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: Source,
    /// Profile of a reference law on [-inf, 0] (dirac:X or uniform:LO:HI) instead of a polynomial.
    #[arg(long, conflicts_with_all = ["roots", "input"])]
    pub measure: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RootsArgs {
    #[command(flatten)]
    pub source: Source,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvOp {
    Boxplus,
    Boxtimes,
    Hadamard,
}

#[derive(Args, Debug)]
pub struct ConvArgs {
    /// Convolution to apply.
    #[arg(long, value_enum)]
    pub op: ConvOp,
    /// Left operand (polynomial JSON).
    pub left: PathBuf,
    /// Right operand (polynomial JSON).
    pub right: PathBuf,
    /// Normalization degree; defaults to the operands' cap.
    #[arg(long)]
    pub n: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    #[command(flatten)]
    pub source: Source,
    /// Power of z.
    #[arg(long)]
    pub a: usize,
    /// Order of the derivative.
    #[arg(long)]
    pub b: usize,
    /// Number of applications.
    #[arg(long)]
    pub ell: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[command(flatten)]
    pub source: Source,
    /// Closed-form measure instead of a polynomial, e.g. uniform:-1:0.
    #[arg(long, conflicts_with_all = ["roots", "input"])]
    pub measure: Option<String>,
    /// G, R, S or psi.
    #[arg(long)]
    pub kind: String,
    /// Argument grid LO:HI:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    pub t_grid: String,
    /// Use the root law of P(-x) (nonpositive roots become nonnegative).
    #[arg(long)]
    pub reflect: bool,
    /// Read R or S off the coefficient profile instead of the roots.
    #[arg(long)]
    pub from_profile: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the JSON sidecar {kind, domain_lo, domain_hi}.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: Source,
    /// NAME:params, e.g. mu_kappa:0.5, nu_aa:1:0.5, nu_ab:0:1:0.3, uniform:-1:0, bernoulli01:0.3.
    #[arg(long)]
    pub closed_form: String,
    /// Evaluation grid LO:HI:COUNT; a default is chosen per closed form.
    #[arg(long, allow_hyphen_values = true)]
    pub t_grid: Option<String>,
    /// Sup-error tolerance.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// Map roots by x -> SCALE x + SHIFT before comparing (default 2:-1 for mu_kappa, else 1:0).
    #[arg(long, allow_hyphen_values = true)]
    pub affine: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
    /// Seed of the random oracle corpus.
    #[arg(long, default_value_t = profilekit_core::suite::DEFAULT_SEED)]
    pub seed: u64,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("PROFILEKIT_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|k| *k > 0)
        .ok_or_else(|| Usage(format!("PROFILEKIT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Make(a) => commands::make(a),
        Command::Profile(a) => commands::profile(a),
        Command::Roots(a) => commands::roots(a),
        Command::Conv(a) => commands::conv(a),
        Command::Diff(a) => commands::diff(a),
        Command::Transform(a) => commands::transform(a),
        Command::Compare(a) => commands::compare(a),
        Command::Suite(a) => commands::suite(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("profilekit: {msg}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 2 } else { 1 })
        }
    }
}
