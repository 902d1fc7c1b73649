mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "dirichlet-graph",
    version,
    about = "Capacities, resolvents and verdicts on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph file for symmetry, sign and degree violations.
    Validate(ValidateArgs),
    /// Decide recurrence or stochastic completeness along an exhaustion.
    Classify(ClassifyArgs),
    /// Equilibrium potential capacities of balls around the origin.
    Capacity(CapacityArgs),
    /// Restricted resolvents (L + alpha)^-1 f along an exhaustion.
    Resolvent(ResolventArgs),
    /// Green-formula boundary sum of a function on a finite realization.
    Green(GreenArgs),
    /// Check the witness conditions u >= 0, Lu <= 0, Lu != 0.
    Witness(WitnessArgs),
    /// Write the ball of a generated family as a graph file.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Generator spec such as lattice:2, tree:2, path_chain:beta=2,mu=1.
    #[arg(long = "gen", value_name = "FAMILY:PARAMS", conflicts_with = "graph")]
    pub generator: Option<String>,
    /// Graph file.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Origin vertex; defaults to the family's own.
    #[arg(long)]
    pub origin: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write output here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Iteration cap for each linear solve.
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuestionArg {
    Recurrence,
    Sc,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(value_name = "FILE", required_unless_present = "graph")]
    pub file: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "file")]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum)]
    pub question: QuestionArg,
    #[arg(long, value_parser = parse_radii, default_value = DEFAULT_RADII)]
    pub radii: Radii,
    #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub alpha: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("extent").required(true).args(["radius", "radii"])))]
pub struct CapacityArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, value_parser = parse_radii)]
    pub radii: Option<Radii>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_parser = parse_radii, default_value = DEFAULT_RADII)]
    pub radii: Radii,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub alpha: f64,
    /// Nonnegative data f; defaults to the indicator of the origin.
    #[arg(long = "u", value_name = "FILE")]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct GreenArgs {
    #[command(flatten)]
    pub source: Source,
    /// Ball radius when the graph comes from a generator.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long = "u", value_name = "FILE")]
    pub u: PathBuf,
    /// Interior-supported test function for the Green identity defect.
    #[arg(long = "v", value_name = "FILE")]
    pub v: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = QuestionArg::Recurrence)]
    pub question: QuestionArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long = "u", value_name = "FILE")]
    pub u: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Generator spec.
    pub family: String,
    #[arg(long)]
    pub radius: usize,
    #[arg(long)]
    pub origin: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

const DEFAULT_RADII: &str = "4,8,16,32";

#[derive(Clone, Debug)]
pub struct Radii(pub Vec<usize>);

fn parse_radii(s: &str) -> Result<Radii, String> {
    let radii = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("invalid radius {t:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err("radii must be strictly increasing".into());
    }
    Ok(Radii(radii))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match commands::threads_from_env() {
        Ok(t) => t,
        Err(f) => return report_failure(f),
    };
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Classify(a) => commands::classify(&a, threads),
        Command::Capacity(a) => commands::capacity(&a, threads),
        Command::Resolvent(a) => commands::resolvent(&a, threads),
        Command::Green(a) => commands::green(&a),
        Command::Witness(a) => commands::witness(&a),
        Command::Gen(a) => commands::gen(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    if !f.message.is_empty() {
        eprintln!("error: {}", f.message);
    }
    ExitCode::from(f.code)
}
