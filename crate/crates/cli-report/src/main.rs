use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cli_report::fields::apply_recursion;
use cli_report::{generate, run_suite, CliError, GenerateParams, SuiteConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Runs verification suites for the drift-flux model, generates exact
/// solutions on grids and applies recursion operators to symmetries.
#[derive(Parser, Debug)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    /// symmetry, cosymmetry, conservation, hamiltonian, recursion, solutions, kernel or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// JSON file with suite parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Θ of an extra Hamiltonian form check.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Ξ of an extra Hamiltonian form check.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// c₀ of an extra Hamiltonian form check.
    #[arg(long, allow_hyphen_values = true)]
    c0: Option<String>,
    /// Optional checks to add, e.g. `r4`.
    #[arg(long)]
    include: Vec<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a solution family on a grid and write CSV plus a JSON sidecar.
    Generate {
        #[command(flatten)]
        params: Box<GenerateParams>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Apply a recursion operator to a symmetry and check the image.
    ApplyRecursion {
        /// T, R1:<word>, R2:<word>, R3:<p0>;<p1>... or R4.
        #[arg(long)]
        op: String,
        /// D, G1, G2, W:<expr>, P:<expr> or R:<Gamma spec>.
        #[arg(long)]
        field: String,
    },
}

fn suite(cli: &Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => SuiteConfig::from_json(
            &std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        )?,
        None => SuiteConfig::default(),
    };
    cfg.theta = cli.theta.clone().or(cfg.theta);
    cfg.xi = cli.xi.clone().or(cfg.xi);
    cfg.c0 = cli.c0.clone().or(cfg.c0);
    cfg.include.extend(cli.include.iter().cloned());
    let report = run_suite(&cli.suite, &cfg, cli.seed)?;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Text => report.to_text(),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        None => suite(cli),
        Some(Command::Generate { params, out }) => {
            let o = generate(params, out)?;
            println!("{}\n{}", o.csv.display(), o.json.display());
            Ok(0)
        }
        Some(Command::ApplyRecursion { op, field }) => {
            let (image, report) = apply_recursion(op, field)?;
            for (k, e) in image.eta.iter().enumerate() {
                println!("eta{} = {e}", k + 1);
            }
            println!("symmetry: {}", if report.pass { "yes" } else { "no" });
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
