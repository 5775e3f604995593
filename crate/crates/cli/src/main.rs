//! `bianchi`: batch front end. Every command writes one JSON document to
//! stdout (or --out); progress goes to stderr.
//!
//! Exit codes: 0 success, 2 bad input or failed precondition, 3 failed
//! verification.

mod commands;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use bianchi_core::error::Error;

#[derive(Parser, Debug)]
#[command(name = "bianchi", version, about = "Modular symbols, Hecke operators and Fourier expansions over Euclidean imaginary quadratic fields")]
struct Cli {
    /// Spaces of JSON indentation; 0 prints compact JSON
    #[arg(long, global = true, default_value_t = 2)]
    json_indent: usize,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for cached Heilbronn families
    #[arg(long, global = true, env = "BIANCHI_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct LevelArgs {
    /// Field Q(√−d), d ∈ {1, 2, 3, 7, 11}
    #[arg(long)]
    pub d: i64,
    /// Level generator "a+bw"
    #[arg(long)]
    pub level: String,
    #[arg(long, default_value_t = 2)]
    pub weight: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions, bases and boundary classes of ℳ_k(Γ₁(n))
    Space {
        #[command(flatten)]
        level: LevelArgs,
        /// Include the relation list and matrix
        #[arg(long)]
        relations: bool,
    },
    /// The Heilbronn–Merel family of η
    Heilbronn {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        eta: String,
        /// Attach the C_Δ certificate; exit 3 if it fails
        #[arg(long)]
        verify: bool,
        /// canonical | alternate residue sets
        #[arg(long, default_value = "canonical")]
        convention: String,
    },
    /// Hecke matrices T_η on the quotient basis
    Hecke {
        #[command(flatten)]
        level: LevelArgs,
        /// Comma-separated list of η
        #[arg(long)]
        eta: String,
        /// Compare with the coset-representative oracle
        #[arg(long)]
        oracle: bool,
        /// Comma-separated η whose operators must commute with every T_η
        #[arg(long)]
        commute_with: Option<String>,
    },
    /// Rational eigensystems of the cuspidal Hecke action
    Eigen {
        #[command(flatten)]
        level: LevelArgs,
        /// Use all η coprime to n with N(η) ≤ this bound
        #[arg(long, default_value_t = 30)]
        max_norm: u64,
        /// Explicit comma-separated η list instead of --max-norm
        #[arg(long)]
        eta: Option<String>,
    },
    /// Fourier coefficients a_α of a rational eigensystem
    Fourier {
        #[command(flatten)]
        level: LevelArgs,
        /// Tabulate all α with N(α) ≤ bound
        #[arg(long, default_value_t = 200)]
        bound: u64,
        /// Norm bound for the Hecke operators that cut out the eigensystem
        #[arg(long, default_value_t = 30)]
        max_norm: u64,
        /// Eigensystem label (default: the first)
        #[arg(long)]
        system: Option<String>,
    },
    /// Evaluate the series F at a point of ℍ₃
    Eval {
        /// Fourier table JSON
        #[arg(long)]
        table: PathBuf,
        /// z as "x+yi"
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        t: f64,
        /// unit | literal
        #[arg(long, default_value = "unit")]
        phase: String,
    },
    /// Relative residual of F|γ = F at one point
    VerifyAutomorphy {
        #[arg(long)]
        table: PathBuf,
        /// "a,b,c,d" with entries "x+yw"
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "unit")]
        phase: String,
    },
    /// Run the verification suite
    Verify {
        /// Smaller ranges
        #[arg(long)]
        quick: bool,
        /// Restrict the algebraic checks to one field
        #[arg(long)]
        d: Option<i64>,
        /// Remove one matrix from a Heilbronn family before certifying
        #[arg(long)]
        inject_fault: bool,
    },
}

/// A failure with its exit code and an optional partial result.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String, Option<Value>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Verification(m) => CliError::Verification(m, None),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn render(v: &Value, indent: usize) -> String {
    if indent == 0 {
        return serde_json::to_string(v).expect("JSON values serialize");
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, serde_json::ser::PrettyFormatter::with_indent(&pad));
    v.serialize(&mut ser).expect("JSON values serialize");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn emit(cli: &Cli, v: &Value) -> Result<(), String> {
    let mut text = render(v, cli.json_indent);
    text.push('\n');
    match &cli.out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Value> {
    let cache = commands::cache(cli.cache_dir.as_deref())?;
    match &cli.command {
        Command::Space { level, relations } => commands::space(level, *relations),
        Command::Heilbronn { d, eta, verify, convention } => {
            commands::heilbronn(*d, eta, *verify, convention, cache.as_ref())
        }
        Command::Hecke { level, eta, oracle, commute_with } => {
            commands::hecke(level, eta, *oracle, commute_with.as_deref())
        }
        Command::Eigen { level, max_norm, eta } => commands::eigen(level, *max_norm, eta.as_deref()),
        Command::Fourier { level, bound, max_norm, system } => {
            commands::fourier(level, *bound, *max_norm, system.as_deref(), cache.as_ref())
        }
        Command::Eval { table, z, t, phase } => commands::eval(table, z, *t, phase),
        Command::VerifyAutomorphy { table, gamma, z, t, phase } => {
            commands::verify_automorphy(table, gamma, z, *t, phase)
        }
        Command::Verify { quick, d, inject_fault } => verify::run(&verify::Plan::new(*quick, *d, *inject_fault)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(v) => match emit(&cli, &v) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(m, payload)) => {
            if let Some(v) = payload {
                if let Err(e) = emit(&cli, &v) {
                    eprintln!("error: {e}");
                }
            }
            eprintln!("verification failed: {m}");
            ExitCode::from(3)
        }
    }
}
