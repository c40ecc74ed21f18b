use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use txconflict_cli::{run, Format, RunConfig, EXIT_ERROR};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Html,
    Csv,
}

/// Detect read-write, write-write and call-mediated conflicts between
/// the functions of Solidity contracts.
#[derive(Debug, Parser)]
#[command(name = "analyze", version)]
struct Cli {
    /// `.sol` files or directories (searched recursively).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Output directory.
    #[arg(long, env = "TXCONFLICT_OUT", default_value = "out")]
    out: PathBuf,

    /// Report formats to write.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "html,csv")]
    format: Vec<FormatArg>,

    /// Treat state-changing functions with unresolved external calls as
    /// conflicting with every other transactional function.
    #[arg(long)]
    conservative_external: bool,

    /// Exit with status 2 when any conflict is found.
    #[arg(long)]
    fail_on_conflicts: bool,

    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// Report every analysis time as 0 for reproducible output.
    #[arg(long)]
    no_timing: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let jobs = cli.jobs.map(usize::from).unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    let config = RunConfig {
        inputs: cli.inputs,
        out_dir: cli.out,
        formats: cli
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Html => Format::Html,
                FormatArg::Csv => Format::Csv,
            })
            .collect(),
        conservative_external: cli.conservative_external,
        fail_on_conflicts: cli.fail_on_conflicts,
        jobs,
        timing: !cli.no_timing,
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
