// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use condosc_cli::{run, Command, RunConfig, RunError};
use condosc_core::sweep::Backend;

#[derive(Parser)]
#[command(name = "condosc", version, about = "Conditional quantum oscillations in coupled qubits")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Closed-form static occupations as CSV.
    StaticTrace,
    /// Driven flip probabilities under the RWA as CSV.
    RwaTrace,
    /// Synchronised CNOT operating point as JSON.
    Sync,
    /// Parameter sweep as long-format CSV.
    Sweep,
    /// Cross-checks closed forms against exact evolution.
    Validate,
    /// Drive-frequency scan with exact evolution as JSON.
    Spectroscopy,
}

#[derive(ValueEnum, Clone, Copy)]
enum BackendArg {
    Rwa,
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    let mut cfg = match RunConfig::load(&path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let command = match cli.command {
        Cmd::StaticTrace => Command::StaticTrace,
        Cmd::RwaTrace => Command::RwaTrace,
        Cmd::Sync => Command::Sync,
        Cmd::Sweep => Command::Sweep,
        Cmd::Validate => Command::Validate,
        Cmd::Spectroscopy => Command::Spectroscopy,
    };
    let backend = cli.backend.map(|b| match b {
        BackendArg::Rwa => Backend::Rwa,
        BackendArg::Oracle => Backend::Oracle,
    });
    let artifact = match run(command, &cfg, backend) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(&e);
        }
    };
    let written = match &cli.out {
        Some(out) => std::fs::write(out, &artifact.text),
        None => {
            print!("{}", artifact.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if artifact.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn exit(e: &RunError) -> ExitCode {
    ExitCode::from(e.exit_code() as u8)
}
