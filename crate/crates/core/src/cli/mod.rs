//! Command-line front end.
//!
//! `qficoe <subcommand> [target] [--config FILE] [--key value ...]`
//!
//! Settings come from the config file, then `QFICOE_OUT_DIR`, then flags;
//! later sources win. Exit codes: 0 success, 1 invalid input, 2 failed
//! computation.

mod commands;
pub mod config;

use std::fmt;
use std::fs;
use std::io::Write;

use clap::{error::ErrorKind, Arg, ArgAction, Command};

pub use config::{ConfigError, RunConfig, KEYS};

use crate::error::Error;

pub const OUT_DIR_ENV: &str = "QFICOE_OUT_DIR";

pub const SUBCOMMANDS: [(&str, &str); 6] = [
    (
        "canonicalize",
        "reduce the Hamiltonian to anisotropic-Heisenberg form",
    ),
    ("evolve", "write a state trajectory"),
    (
        "sweep",
        "QFI, CoE, concurrence and SLD readout along a time grid",
    ),
    ("scan", "randomized search for F < CoE"),
    (
        "roots",
        "time-extrema of CoE from the transcendental equations (target: closed | open)",
    ),
    (
        "figures",
        "figure data and plotting scripts (target: fig1..fig4 | all)",
    ),
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Compute(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Compute(e) => match e {
                Error::InvalidParameter { .. }
                | Error::UnknownFamily(_)
                | Error::InvalidState(_)
                | Error::ImproperRotation { .. }
                | Error::NotHermitian { .. }
                | Error::DimensionMismatch(_) => 1,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Config(e) => write!(f, "invalid setting {e}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(Error::from(e))
    }
}

fn command() -> Command {
    let mut root = Command::new("qficoe")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Quantum Fisher information and curvature of entanglement for two-qubit probes")
        .subcommand_required(true);
    for (name, about) in SUBCOMMANDS {
        let mut sub = Command::new(name)
            .about(about)
            .arg(Arg::new("target").required(false))
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("key = value settings file"),
            );
        for &key in KEYS {
            sub = sub.arg(
                Arg::new(key)
                    .long(key)
                    .value_name("VALUE")
                    .allow_negative_numbers(true)
                    .action(ArgAction::Set),
            );
        }
        root = root.subcommand(sub);
    }
    root
}

/// Runs one invocation. `argv` includes the program name; `env_out_dir` is
/// the value of `QFICOE_OUT_DIR`, if set.
pub fn run<I, S>(
    argv: I,
    env_out_dir: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match dispatch(name, sub, env_out_dir, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(
    name: &str,
    sub: &clap::ArgMatches,
    env_out_dir: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut cfg = match sub.get_one::<String>("config") {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config `{path}`: {e}")))?;
            RunConfig::parse_file(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = env_out_dir {
        cfg.set("out_dir", dir)?;
    }
    for &key in KEYS {
        if let Some(v) = sub.get_one::<String>(key) {
            cfg.set(key, v)?;
        }
    }
    let target = sub.get_one::<String>("target").map(String::as_str);
    commands::execute(name, target, &cfg, out)
}
