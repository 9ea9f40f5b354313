mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, JobConfig, Kind, Number};
use error::CliError;

/// Apply functions of differential operators to sampled fields.
#[derive(Parser, Debug)]
#[command(name = "specgrad", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator to a field and write the result.
    Apply(ApplyArgs),
    /// Tabulate the real-space kernel of a 1D operator symbol.
    Kernel(KernelArgs),
    /// Run the oracle catalog and the brute-force comparison.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Samples per axis, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid_n: Vec<usize>,
    /// Spacing per axis; expressions such as `2*pi/64` are allowed.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid_spacing: Vec<String>,
    /// First sample coordinate per axis (default 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid_origin: Vec<String>,
}

#[derive(Args, Debug, Default)]
struct OperatorArgs {
    /// Operator symbol in `z`, e.g. `cos(z^2)`.
    #[arg(long, allow_hyphen_values = true)]
    symbol: Option<String>,
    /// Beta component; repeat once per axis. Complex values like `0.5+0.1*i` are allowed.
    #[arg(long, allow_hyphen_values = true)]
    beta: Vec<String>,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    /// JSON job file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    operator: OperatorArgs,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Heat-kernel time for `--kind heat-realspace`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Input field as an expression in x, y, z.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input")]
    field: Option<String>,
    /// Input field file (CSV or JSON); its grid is used.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; the format follows the extension unless --format is given.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write the run summary (stability report, warnings) to this JSON file.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    operator: OperatorArgs,
    /// Kernel CSV (`rho,re,im`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Closed-form kernel CSV, when one is known (default: `<out>_closed.csv`).
    #[arg(long)]
    closed_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run only the named case; repeatable.
    #[arg(long = "case")]
    cases: Vec<String>,
    /// JSON report path (default: verify-report.json).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Number of randomized brute-force trials.
    #[arg(long)]
    trials: Option<usize>,
}

fn exprs(values: Vec<String>) -> Vec<Number> {
    values.into_iter().map(Number::Expr).collect()
}

impl GridArgs {
    fn merge(self, cfg: &mut JobConfig) {
        if !self.grid_n.is_empty() {
            cfg.grid.n = self.grid_n;
            cfg.grid.dims = None;
        }
        if !self.grid_spacing.is_empty() {
            cfg.grid.spacing = exprs(self.grid_spacing);
        }
        if !self.grid_origin.is_empty() {
            cfg.grid.origin = exprs(self.grid_origin);
        }
    }
}

impl OperatorArgs {
    fn merge(self, cfg: &mut JobConfig) {
        if self.symbol.is_some() {
            cfg.operator.symbol = self.symbol;
        }
        if !self.beta.is_empty() {
            cfg.operator.beta = exprs(self.beta);
        }
    }
}

fn merge_apply(args: ApplyArgs) -> Result<JobConfig, CliError> {
    let mut cfg = JobConfig::load_or_default(args.config.as_deref())?;
    args.grid.merge(&mut cfg);
    args.operator.merge(&mut cfg);
    if let Some(kind) = args.kind {
        cfg.operator.kind = Some(kind);
    }
    if let Some(alpha) = args.alpha {
        cfg.operator.alpha = Some(Number::Expr(alpha));
    }
    if let Some(field) = args.field {
        cfg.set_field(field);
    }
    if let Some(input) = args.input {
        cfg.set_input(input);
    }
    cfg.out = args.out.or(cfg.out);
    cfg.format = args.format.or(cfg.format);
    cfg.diagnostics = args.diagnostics.or(cfg.diagnostics);
    Ok(cfg)
}

fn merge_kernel(args: KernelArgs) -> Result<JobConfig, CliError> {
    let mut cfg = JobConfig::load_or_default(args.config.as_deref())?;
    args.grid.merge(&mut cfg);
    args.operator.merge(&mut cfg);
    cfg.out = args.out.or(cfg.out);
    cfg.closed_out = args.closed_out.or(cfg.closed_out);
    Ok(cfg)
}

fn merge_verify(args: VerifyArgs) -> Result<JobConfig, CliError> {
    let mut cfg = JobConfig::load_or_default(args.config.as_deref())?;
    if !args.cases.is_empty() {
        cfg.cases = args.cases;
    }
    cfg.report = args.report.or(cfg.report);
    cfg.trials = args.trials.or(cfg.trials);
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Apply(args) => commands::apply(&merge_apply(args)?),
        Command::Kernel(args) => commands::kernel(&merge_kernel(args)?),
        Command::Verify(args) => commands::verify(&merge_verify(args)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
