//! `isogap`: command-line driver for the gap computations.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use isogap_core::{Error, Result};
use serde_json::json;

use config::{Command, JobConfig};
use output::{sha256_hex, Artifacts, Manifest, Versions, MANIFEST};

const EXIT_USAGE: u8 = 2;
const EXIT_PREFLIGHT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "isogap", version, about = "Spectral gap computations for isometries of R^3")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Job configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the numerical kernels.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_class(e: &Error) -> (u8, &'static str) {
    if e.is_usage() {
        (EXIT_USAGE, "usage")
    } else if e.is_preflight() {
        (EXIT_PREFLIGHT, "preflight")
    } else {
        (EXIT_NUMERICAL, "numerical")
    }
}

fn execute(cli: Cli) -> Result<()> {
    let started = Instant::now();
    let started_unix_seconds = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Io(format!("{}: {e}", cli.config.display())))?;
    let config_dir = cli.config.parent().map(PathBuf::from).unwrap_or_default();
    let job = JobConfig::parse(&text)?.resolve(cli.command, &config_dir, cli.seed, cli.out)?;
    let effective = serde_json::to_vec(&job).map_err(|e| Error::Io(e.to_string()))?;

    let mut artifacts: Artifacts = commands::run(&job)?;
    let manifest = Manifest {
        command: job.command.as_str(),
        config_sha256: sha256_hex(&effective),
        seed: job.seed,
        versions: Versions { isogap: env!("CARGO_PKG_VERSION"), isogap_core: isogap_core::VERSION },
        threads: rayon::current_num_threads(),
        started_unix_seconds,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        artifacts: artifacts.listing(),
    };
    artifacts.add_json(MANIFEST, &manifest)?;
    artifacts.commit(&job.output)?;
    println!("{}", job.output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, class) = exit_class(&e);
            let body = json!({ "error": { "code": e.code(), "class": class, "message": e.to_string() } });
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
