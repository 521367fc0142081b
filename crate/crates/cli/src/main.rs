//! Batch experiment runner for the heavy-tailed diffusion samplers.
//!
//! One declarative TOML config describes one experiment writing one output
//! directory: CSV files (authoritative), an optional SVG plot, and a
//! `manifest.txt` recording the config hash and seed for reproducibility.
//! Exit codes: 0 success, 1 operational error, 2 scientific invariant
//! violation.

mod config;
mod experiments;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use experiments::RunError;

#[derive(Parser)]
#[command(name = "heavytail", version, about = "Diffusion samplers for heavy-tailed targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by a config file.
    Run(RunArgs),
    /// Parse and validate a config file without running anything.
    Validate { config: PathBuf },
    /// Summarize a completed run directory.
    Report { run_dir: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory (also via HEAVYTAIL_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit SVG plots alongside the CSV output.
    #[arg(long)]
    emit_svg: bool,
    /// Dump individual paths (capped by run.paths_dump_limit).
    #[arg(long)]
    emit_paths: bool,
    /// Worker threads (0 = all available).
    #[arg(long)]
    threads: Option<usize>,
}

fn load_validated(path: &PathBuf) -> Result<ExperimentConfig, String> {
    let config = ExperimentConfig::from_file(path)?;
    config.validate().map_err(|problems| {
        let mut msg = String::from("invalid config:\n");
        for p in &problems {
            msg.push_str("  - ");
            msg.push_str(p);
            msg.push('\n');
        }
        msg
    })?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match load_validated(&config) {
            Ok(_) => {
                println!("config ok");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        },
        Command::Report { run_dir } => match report::report(&run_dir) {
            Ok(text) => {
                let path = run_dir.join("summary.txt");
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        },
        Command::Run(args) => {
            let mut config = match load_validated(&args.config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(seed) = args.seed {
                config.run.master_seed = seed;
            }
            if args.emit_svg {
                config.run.emit_svg = true;
            }
            if args.emit_paths {
                config.run.emit_paths = true;
            }
            if let Some(threads) = args.threads {
                config.run.threads = threads;
            }
            let out_dir = args
                .out
                .or_else(|| std::env::var_os("HEAVYTAIL_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(&config.run.output_dir));

            if config.run.threads > 0 {
                // The pool is global; ignore the error if a test harness
                // already built one.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(config.run.threads)
                    .build_global();
            }

            match experiments::run(&config, &out_dir) {
                Ok(()) => {
                    println!("run complete: {}", out_dir.display());
                    ExitCode::SUCCESS
                }
                Err(RunError::Operational(m)) => {
                    eprintln!("error: {m}");
                    ExitCode::from(1)
                }
                Err(RunError::Invariant(m)) => {
                    eprintln!("invariant violation: {m}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
