mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riemann_core::Error;
use serde::{Deserialize, Serialize};

/// Numerical checks of the uncertainty relation built on the Riemann operator.
#[derive(Parser, Debug)]
#[command(name = "riemann", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Working precision in bits; overrides RIEMANN_PREC_BITS and the per-command default.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for reports, CSV files and manifests.
    #[arg(long, global = true, default_value = "riemann-out")]
    pub out_dir: PathBuf,
    /// Coefficient cache directory (default: <out-dir>/cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate ζ(s).
    Zeta(commands::ZetaArgs),
    /// Extract (or load cached) Taylor coefficients of ζ about s = 0.
    Coeffs(commands::CoeffsArgs),
    /// Check the uncertainty relation for one pair of amplitudes.
    Verify(commands::VerifyArgs),
    /// Random-coefficient campaign of the matrix-form uncertainty check.
    Campaign(commands::CampaignArgs),
    /// Scan g(t; ε) against f(ε) along Re s = (1+ε)/2.
    Scan(commands::ScanArgs),
    /// Same as scan, with the constant f(ε) added as a CSV column.
    Fig1(commands::ScanArgs),
    /// Locate the critical-line zero nearest an ordinate.
    ZeroFind(commands::ZeroFindArgs),
    /// Re-run the command recorded in a manifest.
    Replay(commands::ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Zeta(_) => "zeta",
            Command::Coeffs(_) => "coeffs",
            Command::Verify(_) => "verify",
            Command::Campaign(_) => "campaign",
            Command::Scan(_) => "scan",
            Command::Fig1(_) => "fig1",
            Command::ZeroFind(_) => "zero-find",
            Command::Replay(_) => "replay",
        }
    }
}

/// Exit codes: 0 ok, 1 usage, 2 numeric failure, 3 direct violation, 4 paper-form mismatch.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const NUMERIC: u8 = 2;
    pub const VIOLATION: u8 = 3;
    pub const MISMATCH: u8 = 4;
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => exit::USAGE,
        _ => exit::NUMERIC,
    }
}

pub fn run(argv: Vec<OsString>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return exit::USAGE;
        }
        // a second call in the same process (replay) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::dispatch(&cli, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
