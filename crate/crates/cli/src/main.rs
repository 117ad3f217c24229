//! `pauli-dfs`: decoherence-free subspaces of Pauli-subgroup error models.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dfs_core::report::{self, Options};
use dfs_core::{DfsError, DEFAULT_DENSE_LIMIT};

#[derive(Parser, Debug)]
#[command(
    name = "pauli-dfs",
    version,
    about = "Decoherence-free subspaces for Pauli-subgroup error models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Random trials per verification or scan.
    #[arg(long, global = true, default_value_t = 32)]
    trials: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest qubit count for dense 2^K x 2^K matrices.
    #[arg(long, global = true, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,

    /// Emit the JSON report.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,

    /// Emit the human-readable report (default).
    #[arg(long, global = true)]
    text: bool,

    /// Exit with status 2 instead of reporting on a non-Abelian subgroup.
    #[arg(long, global = true)]
    require_dfs: bool,

    /// Include wall-clock timing (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze the subgroup generated by Pauli strings such as ZI IZ or -iXY.
    Analyze {
        /// Generators; commas also separate strings. Put `--` before a
        /// string with a leading minus sign.
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// Analyze a built-in example: qz, qx, q4, q2z or q8.
    Preset { name: String },
    /// Run a state through random channels built from the subgroup.
    Channel {
        #[arg(required = true)]
        generators: Vec<String>,

        /// State such as "|00>" or "0.7071|00> + 0.7071|11>"; renormalized.
        #[arg(long)]
        state: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let c = &cli.common;
    let opts = Options {
        trials: c.trials,
        seed: c.seed,
        dense_limit: c.dense_limit,
        require_dfs: c.require_dfs,
        timing: c.timing,
    };

    let outcome = match &cli.command {
        Command::Analyze { generators } => report::cmd_analyze(generators, &opts)
            .and_then(|r| render(c.json, r.numeric_ok(), r.to_json(), r.to_text())),
        Command::Preset { name } => {
            report::cmd_preset(name, &opts).and_then(|r| render(c.json, r.numeric_ok(), r.to_json(), r.to_text()))
        }
        Command::Channel { generators, state } => report::cmd_channel(generators, state, &opts)
            .and_then(|r| render(c.json, r.numeric_ok(), r.to_json(), r.to_text())),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("pauli-dfs: numeric self-check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("pauli-dfs: {e}");
            ExitCode::from(report::exit_code(&e) as u8)
        }
    }
}

fn render(json: bool, ok: bool, json_text: Result<String, DfsError>, text: String) -> Result<bool, DfsError> {
    let body = if json { json_text? + "\n" } else { text };
    let mut out = io::stdout().lock();
    match out.write_all(body.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(DfsError::Serde(format!("writing report: {e}"))),
        _ => Ok(ok),
    }
}
