use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exact censuses, mass formulas and trace-formula checks for the
/// superspecial locus.
#[derive(Debug, Parser)]
#[command(name = "superspecial", version)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Supersingular j-invariants over F_{p^2} and the counts H, F, T.
    Census {
        #[arg(short)]
        p: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// One census row per prime in [pmin, pmax].
    Sweep(SweepArgs),
    /// Mass, |GSp_2g(Z/N)| and the level-N class number.
    Mass(MassArgs),
    /// Trace formula on a finite model read from a spec file.
    TraceDemo(TraceDemoArgs),
    /// Run every end-to-end check and print one line per check.
    Verify,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub pmin: u64,
    #[arg(long)]
    pub pmax: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads (default: available cores, at most 8).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Census cache directory; overrides SUPERSPECIAL_CACHE_DIR.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Report cache hits and timing on stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct MassArgs {
    #[arg(short)]
    pub g: u32,
    #[arg(short)]
    pub p: u64,
    /// Level; the class number needs N >= 3.
    #[arg(short = 'N')]
    pub n: Option<u64>,
    #[arg(long)]
    pub nonprincipal: bool,
    /// Trace of the Frobenius operator; recovers the type number (H + tr)/2.
    #[arg(long, allow_hyphen_values = true)]
    pub trace: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TraceDemoArgs {
    /// Model spec file (`group:`, `gamma:`, `k:`, `pi:` lines).
    pub spec: Option<PathBuf>,
    /// Random models to draw in the spec's group (or --group).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Group for --trials when no spec file is given, e.g. `sym:4`.
    #[arg(long)]
    pub group: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Census { p, format } => commands::census(p, format),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Mass(args) => commands::mass(&args),
        Command::TraceDemo(args) => commands::trace_demo(&args),
        Command::Verify => commands::verify(),
    };
    let (text, failure) = match result {
        Ok(out) => (out.text, out.failure),
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    if let Err(f) = commands::emit(&text, cli.output.as_deref()) {
        eprintln!("error: {}", f.message());
        return ExitCode::from(f.code());
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
