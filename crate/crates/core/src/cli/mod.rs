//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a theorem or property check
//! fails, 2 for unreadable or malformed input (and bad arguments), 3 when the
//! input parses but violates a precondition.

mod commands;
mod output;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::circuits::DriveMode;
use crate::error::Error;
use crate::numkit::DEFAULT_REL_TOL;
use crate::susy::HamiltonianBlocks;

pub use commands::{circuit_analyze, graph_analyze, verify_projections, Outcome};
pub use output::{to_json, to_text, SCHEMA};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CASES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeStrategy {
    /// Depth-first from vertex 0, incident edges in input order.
    Dfs,
}

impl TreeStrategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dfs => "dfs",
        }
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Tolerance for theorem ratios and spectrum matching.
    pub tol: f64,
    /// Relative cutoff for zero eigenvalues and singular values.
    pub zero_tol: f64,
    pub tree_strategy: TreeStrategy,
    pub format: Format,
    pub susy_blocks: HamiltonianBlocks,
    pub seed: u64,
    pub cases: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            zero_tol: DEFAULT_REL_TOL,
            tree_strategy: TreeStrategy::Dfs,
            format: Format::Text,
            susy_blocks: HamiltonianBlocks::default(),
            seed: DEFAULT_SEED,
            cases: DEFAULT_CASES,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn drive_pair(s: &str) -> Result<(usize, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected RESISTOR=VALUE")?;
    let k = k.trim().parse::<usize>().map_err(|e| format!("resistor index: {e}"))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("value: {e}"))?;
    if !v.is_finite() {
        return Err("value must be finite".into());
    }
    Ok((k, v))
}

#[derive(Debug, Parser)]
#[command(name = "oblique-kit", version, about = "Oblique projection, graph and resistor-network analysis")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Tolerance for theorem ratios and spectrum matching.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    tol: f64,
    /// Relative cutoff below which eigenvalues and singular values count as zero.
    #[arg(long = "zero-tol", global = true, default_value_t = DEFAULT_REL_TOL, value_parser = positive)]
    zero_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long = "tree-strategy", global = true, value_enum, default_value_t = TreeStrategy::Dfs)]
    tree_strategy: TreeStrategy,
    /// Upper Hamiltonian block: k0 (K0 − I) or k1 (K1 − I).
    #[arg(long = "susy-blocks", global = true, default_value = "k0")]
    susy_blocks: HamiltonianBlocks,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check both theorems for a projection pair given as JSON {"P0", "P1", "G", "H"?}.
    VerifyProjections { file: PathBuf },
    /// Weighted graph commands.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Resistor network commands.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
    /// Run the worked examples and the seeded property suites.
    Selftest {
        #[arg(long, env = "OBLIQUE_KIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random cases per property suite.
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        #[arg(long = "inject-fault", hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Tree, cycle and cocycle bases, tree polynomials and theorem checks.
    Analyze { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum CircuitCommand {
    /// Power forms, spectra, a driven solve and the self-duality check.
    Analyze {
        file: PathBuf,
        /// Override a source value: RESISTOR=VALUE (amperes on chords, volts on tree resistors).
        #[arg(long = "drive", value_parser = drive_pair)]
        drive: Vec<(usize, f64)>,
        /// `current` or `voltage`. Defaults to current unless the netlist has only voltage sources.
        #[arg(long, value_parser = clap::value_parser!(DriveMode))]
        mode: Option<DriveMode>,
    },
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let g = cli.global;
    let mut cfg = RunConfig {
        tol: g.tol,
        zero_tol: g.zero_tol,
        tree_strategy: g.tree_strategy,
        format: g.format,
        susy_blocks: g.susy_blocks,
        ..RunConfig::default()
    };
    let result = match cli.command {
        Command::VerifyProjections { file } => verify_projections(&file, &cfg),
        Command::Graph { command: GraphCommand::Analyze { file } } => graph_analyze(&file, &cfg),
        Command::Circuit { command: CircuitCommand::Analyze { file, drive, mode } } => {
            circuit_analyze(&file, &drive, mode, &cfg)
        }
        Command::Selftest { seed, cases, inject_fault } => {
            cfg.seed = seed;
            cfg.cases = cases;
            Ok(selftest::run(&cfg, inject_fault))
        }
    };
    match result {
        Ok(outcome) => {
            let text = match cfg.format {
                Format::Json => to_json(&outcome.report),
                Format::Text => to_text(&outcome.report),
            };
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_FAIL;
            }
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let code = exit_code_for(&e);
            if cfg.format == Format::Json {
                let doc = json!({
                    "schema": SCHEMA,
                    "error": { "kind": error_kind(&e), "message": e.to_string() },
                    "exit_code": code,
                });
                let _ = stdout.write_all(to_json(&doc).as_bytes());
            }
            let _ = writeln!(stderr, "error: {e}");
            code
        }
    }
}
