use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geogate_cli::config::Kind;
use geogate_cli::error::CliError;
use geogate_cli::{execute, out_dir_default, thread_count, Options};

#[derive(Parser)]
#[command(name = "geogate", version, about = "Geometric and dynamical gate simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise control pulses and report areas, times and path data.
    Synth(Common),
    /// Propagate single gates with optional control errors.
    Simulate(Common),
    /// Scan fidelity over amplitude and detuning error grids.
    Scan(Common),
    /// Device-level fidelities under the master equation, with optional sweeps.
    Master(Common),
    /// Fidelity table for all gates and both schemes.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to out/<config stem>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
    /// Worker threads; falls back to GEOGATE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, c) = match cli.command {
        Command::Synth(c) => (Kind::Synth, c),
        Command::Simulate(c) => (Kind::Simulate, c),
        Command::Scan(c) => (Kind::Scan, c),
        Command::Master(c) => (Kind::Master, c),
        Command::Report(c) => (Kind::Report, c),
    };
    match start(kind, c) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}

fn start(kind: Kind, c: Common) -> Result<Vec<PathBuf>, CliError> {
    let env = std::env::var("GEOGATE_THREADS").ok();
    if let Some(n) = thread_count(c.threads, env.as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let out = c.out.unwrap_or_else(|| out_dir_default(&c.config));
    execute(
        kind,
        &Options {
            config: c.config,
            out,
            plots: c.plots,
        },
    )
}
