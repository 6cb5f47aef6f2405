use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod failure;
mod inputs;
mod output;

use commands::Outcome;
use config::{Flags, RunConfig};
use output::OutputDir;

#[derive(Parser)]
#[command(name = "mindisk", version, about = "Minimal disks, multi-valued graphs and blow-up checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a surface and write its mesh and geometry.
    Generate(Flags),
    /// Solve the minimal graph equation on an annular domain.
    Solve(Flags),
    /// Run a verification suite.
    Verify(Flags),
    /// Convert between mesh and graph formats.
    Export(Flags),
}

fn init_threads() -> anyhow::Result<()> {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("MINDISK_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| failure::Usage::new(format!("MINDISK_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn execute(name: &str, flags: &Flags) -> anyhow::Result<Outcome> {
    init_threads()?;
    let cfg = RunConfig::load(name, flags)?;
    cfg.check_paths(commands::OUTPUT_FILES)?;
    let mut out = OutputDir::create(&cfg.output)?;
    let outcome = match name {
        "generate" => commands::generate::run(&cfg, &mut out),
        "solve" => commands::solve::run(&cfg, &mut out),
        "verify" => commands::verify::run(&cfg, &mut out),
        _ => commands::export::run(&cfg, &mut out),
    }?;
    let manifest = out.finish(&cfg, outcome.status)?;
    println!("manifest: {}", manifest.display());
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { failure::USAGE } else { failure::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, flags) = match &cli.command {
        Command::Generate(f) => ("generate", f),
        Command::Solve(f) => ("solve", f),
        Command::Verify(f) => ("verify", f),
        Command::Export(f) => ("export", f),
    };
    match execute(name, flags) {
        Ok(o) => ExitCode::from(o.code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure::exit_code(&e))
        }
    }
}
