use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starris::cli::{self, Invocation};

#[derive(Parser)]
#[command(name = "starris", version, about = "STAR-RIS wireless-powered NOMA/TDMA performance runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every [[experiment]] and write one CSV each.
    Run(Common),
    /// Run GA-TAPA over the [optimize] element counts.
    Optimize(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; optional when --preset is given.
    config: Option<PathBuf>,
    /// Override a key, e.g. --set system.snr_db=35 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Bundled configuration (fig4 .. fig11) used as the base.
    #[arg(long)]
    preset: Option<String>,
    /// Seed for Monte Carlo and the GA.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per experiment.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (is_run, c) = match args.command {
        Command::Run(c) => (true, c),
        Command::Optimize(c) => (false, c),
    };
    if let Some(n) = c.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let inv = Invocation { config: c.config, preset: c.preset, overrides: c.overrides, seed: c.seed, trials: c.trials };
    let result = if is_run { cli::run(&inv, &c.out) } else { cli::optimize(&inv, &c.out) };
    match result {
        Ok(out) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            println!("{}", out.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
