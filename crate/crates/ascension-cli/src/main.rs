//! `ascension`: batch experiments on magnetic ascension, phase transport and flows.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ParamArgs, RunConfig};
use report::{write_json, Diagnostic, Summary, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "ascension", version, about = "Ascension of Laplace eigenfunctions on hyperbolic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ascended Whittaker profiles and their peak table
    Whittaker(RunArgs),
    /// Exact ascension of one cylindrical wave against the transfer product, plus phase data
    Ascend(RunArgs),
    /// Compare the transported semiclassical quadratic forms of a geodesic packet
    MeasureTransport(RunArgs),
    /// Closed-form flows, their Hamiltonian conjugacy and the transported geodesic
    Flows(RunArgs),
    /// Discrepancy of Birkhoff averages along one orbit on the octagon surface
    Equidistribute(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// JSON file with parameter defaults; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [.]
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Exit with status 1 unless every check passes
    #[arg(long = "assert")]
    assert_checks: bool,
    /// Print the verdict as one JSON object on stdout
    #[arg(long)]
    json_summary: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Whittaker(_) => "whittaker",
            Command::Ascend(_) => "ascend",
            Command::MeasureTransport(_) => "measure-transport",
            Command::Flows(_) => "flows",
            Command::Equidistribute(_) => "equidistribute",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Whittaker(a)
            | Command::Ascend(a)
            | Command::MeasureTransport(a)
            | Command::Flows(a)
            | Command::Equidistribute(a) => a,
        }
    }
}

fn run(command: &Command) -> anyhow::Result<Summary> {
    let args = command.args();
    let file = match &args.config {
        Some(path) => ParamArgs::from_file(path)?,
        None => ParamArgs::default(),
    };
    let cfg = RunConfig::resolve(command.name(), args.out.clone(), args.params.clone().over(file))?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut summary = Summary::new(command.name());
    match command {
        Command::Whittaker(_) => commands::whittaker(&cfg, &mut summary)?,
        Command::Ascend(_) => commands::ascend_cmd(&cfg, &mut summary)?,
        Command::MeasureTransport(_) => commands::measure_transport(&cfg, &mut summary)?,
        Command::Flows(_) => commands::flows(&cfg, &mut summary)?,
        Command::Equidistribute(_) => commands::equidistribute(&cfg, &mut summary)?,
    }
    write_json(&cfg.out.join("run_config.json"), &cfg)?;
    if args.assert_checks {
        summary.passed = Some(summary.all_passed());
    }
    write_json(&cfg.out.join(format!("{}_summary.json", cfg.command)), &summary)?;
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();
    match run(&cli.command) {
        Ok(summary) => {
            let text = serde_json::to_string(&summary).unwrap_or_default();
            if args.json_summary {
                println!("{text}");
            }
            if summary.passed == Some(false) {
                if !args.json_summary {
                    eprintln!("{text}");
                }
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let diag = Diagnostic { schema_version: SCHEMA_VERSION, command: cli.command.name().into(), error: format!("{err:#}") };
            let text = serde_json::to_string(&diag).unwrap_or_default();
            if args.json_summary {
                println!("{text}");
            }
            eprintln!("{text}");
            ExitCode::from(2)
        }
    }
}
