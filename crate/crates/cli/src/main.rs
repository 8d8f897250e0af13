mod commands;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use framecomplex::{Error, Outcome};

use commands::Output;
use config::{Format, RunConfig};

const USAGE_EXIT: u8 = 3;

/// Frame posets over Z/m, exact poset homology and verification of
/// connectivity and stability statements at desk scale.
#[derive(Parser, Debug)]
#[command(name = "framecomplex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List a frame poset by length
    Enumerate,
    /// Reduced integer homology of a frame poset
    Homology,
    /// Check the stable range conditions S_m, or S_n^k when --n and --k are given
    StableRank,
    /// Orbit of the standard frame under the elementary symplectic group
    Orbit,
    /// Extend a unimodular frame to a hyperbolic basis
    CompleteBasis {
        /// Frame as `1,0,0,0;0,0,1,0`; a random one from --seed otherwise
        #[arg(long)]
        frame: Option<String>,
    },
    /// Check one statement on a desk-scale instance
    Verify {
        #[arg(long)]
        theorem: String,
        /// Named instance for p-n-t, h-n, surj and wh1
        #[arg(long)]
        instance: Option<String>,
    },
    /// Run seeded verification suites
    Report {
        /// Suite name or `all`
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Enumerate => "enumerate".into(),
            Command::Homology => "homology".into(),
            Command::StableRank => "stable-rank".into(),
            Command::Orbit => "orbit".into(),
            Command::CompleteBasis { .. } => "complete-basis".into(),
            Command::Verify { theorem, .. } => format!("verify {theorem}"),
            Command::Report { suite } => format!("report {suite}"),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: String,
    config: &'a RunConfig,
    outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtimes_ms: Option<BTreeMap<String, u64>>,
    result: &'a serde_json::Value,
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let cfg = &cli.config;
    cfg.validate()?;
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Enumerate => commands::enumerate(cfg, &cfg.budget()),
        Command::Homology => commands::homology(cfg, &cfg.budget()),
        Command::StableRank => commands::stable_range(cfg, &cfg.budget()),
        Command::Orbit => commands::orbit(cfg, &cfg.budget()),
        Command::CompleteBasis { frame } => commands::complete_basis(cfg, frame.as_deref(), &cfg.budget()),
        Command::Verify { theorem, instance } => commands::verify(cfg, theorem, instance.as_deref(), &cfg.budget()),
        Command::Report { suite } => commands::report(cfg, suite),
    }?;
    if out.steps.is_empty() {
        out.steps.push((cli.command.name(), start.elapsed().as_millis() as u64));
    }
    Ok(out)
}

fn render(cli: &Cli, out: &Output) -> String {
    let cfg = &cli.config;
    match cfg.format {
        Format::Tsv => out.tsv.clone(),
        Format::Json => {
            let env = Envelope {
                tool: "framecomplex",
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name(),
                config: cfg,
                outcome: out.outcome,
                runtimes_ms: cfg.timings.then(|| out.steps.iter().cloned().collect()),
                result: &out.body,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.config.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } => USAGE_EXIT,
        Error::BudgetExceeded(_) | Error::Overflow(_) => Outcome::Inconclusive.exit_code() as u8,
        Error::Internal(_) => Outcome::Fail.exit_code() as u8,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT),
            };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.config.workers).build_global() {
        eprintln!("framecomplex: worker pool: {e}");
        return ExitCode::from(USAGE_EXIT);
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &render(&cli, &out)) {
                eprintln!("framecomplex: writing output: {e}");
                return ExitCode::from(USAGE_EXIT);
            }
            ExitCode::from(out.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("framecomplex: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
