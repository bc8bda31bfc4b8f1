//! The `expsum` experiment runner.
//!
//! Every subcommand produces one table, written as CSV (default) or JSON to
//! `--out` or standard output. With `--out`, a run manifest is written next
//! to the data as `<out>.manifest.json`.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric guard or overflow,
//! 3 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod manifest;
pub mod table;

use config::Settings;
use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "expsum", version, about = "Random exponential sums and exact lattice counts")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all subcommands.
///
/// Precedence: flags, then `EXPSUM_*` environment variables, then the
/// `--config` file, then built-in defaults.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Master seed [default: 42]
    #[arg(long, global = true, env = "EXPSUM_SEED")]
    pub seed: Option<u64>,
    /// Samples per measurement [default: 200]
    #[arg(long, global = true, env = "EXPSUM_SAMPLES")]
    pub samples: Option<u64>,
    /// Worker threads; affects wall time only
    #[arg(long, global = true, env = "EXPSUM_THREADS")]
    pub threads: Option<usize>,
    /// Output file (standard output when absent)
    #[arg(long, global = true, env = "EXPSUM_OUT")]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum, env = "EXPSUM_FORMAT")]
    pub format: Option<Format>,
    /// Tolerance for truncated probability computations [default: 1e-8]
    #[arg(long, global = true, env = "EXPSUM_TOL")]
    pub tol: Option<f64>,
    /// File of key=value lines (seed, samples, threads, out, format, tol)
    #[arg(long, global = true, env = "EXPSUM_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Moment(commands::moment::MomentArgs),
    Shell(commands::shell::ShellArgs),
    Divisor(commands::arith::DivisorArgs),
    Repcount(commands::arith::RepcountArgs),
    Greenruzsa(commands::arith::GreenRuzsaArgs),
    Majorant(commands::majorant::MajorantArgs),
    Verify(commands::verify::VerifyArgs),
    Slope(commands::slope::SlopeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moment(_) => "moment",
            Command::Shell(_) => "shell",
            Command::Divisor(_) => "divisor",
            Command::Repcount(_) => "repcount",
            Command::Greenruzsa(_) => "greenruzsa",
            Command::Majorant(_) => "majorant",
            Command::Verify(_) => "verify",
            Command::Slope(_) => "slope",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(expsum::Error),
    Io(std::io::Error),
    /// Verification failed; the table is still written.
    Verify(Table),
}

impl From<expsum::Error> for CliError {
    fn from(e: expsum::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(expsum::Error::InvalidArgument(_)) => EXIT_USAGE,
            CliError::Core(_) => EXIT_NUMERIC,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

fn execute(command: &Command, settings: &Settings) -> Result<Table, CliError> {
    match command {
        Command::Moment(a) => commands::moment::run(a, settings),
        Command::Shell(a) => commands::shell::run(a, settings),
        Command::Divisor(a) => commands::arith::divisor(a),
        Command::Repcount(a) => commands::arith::repcount(a),
        Command::Greenruzsa(a) => commands::arith::greenruzsa(a, settings),
        Command::Majorant(a) => commands::majorant::run(a, settings),
        Command::Verify(a) => commands::verify::run(a, settings),
        Command::Slope(a) => commands::slope::run(a),
    }
}

fn emit(
    table: &Table,
    settings: &Settings,
    command: &Command,
    argv: &[String],
    started: std::time::SystemTime,
) -> Result<(), CliError> {
    let bytes = table.render(settings.format)?;
    match &settings.out {
        Some(path) => {
            std::fs::write(path, &bytes)?;
            let m = manifest::RunManifest::new(command.name(), argv, settings.seed, started, &bytes);
            std::fs::write(manifest::manifest_path(path), m.to_json())?;
        }
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn run_parsed(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    let started = std::time::SystemTime::now();
    let settings = config::resolve(&cli.global)?;
    let work = || match execute(&cli.command, &settings) {
        Ok(table) => emit(&table, &settings, &cli.command, argv, started),
        Err(CliError::Verify(table)) => {
            emit(&table, &settings, &cli.command, argv, started)?;
            Err(CliError::Verify(table))
        }
        Err(e) => Err(e),
    };
    match settings.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Run the CLI on `argv` (including the program name) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    let printable: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run_parsed(&cli, &printable) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Io(err) => eprintln!("error: {err}"),
                CliError::Verify(_) => eprintln!("verify: one or more checks failed"),
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(
            CliError::Core(expsum::Error::InvalidArgument("x".into())).exit_code(),
            1
        );
        assert_eq!(CliError::Core(expsum::Error::Overflow("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(expsum::Error::Guard("x".into())).exit_code(), 2);
        assert_eq!(CliError::Verify(Table::new(&[])).exit_code(), 3);
    }

    #[test]
    fn parse_errors_are_usage_errors() {
        assert_eq!(run(["expsum", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["expsum", "--help"]), EXIT_OK);
        assert_eq!(run(["expsum", "divisor", "--x", "0.5"]), EXIT_USAGE);
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
