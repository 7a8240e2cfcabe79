mod report;
mod scenario;
mod selftest;
mod serialize;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "deskcat", version, about = "Run scenario files and the randomized self-test")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the tasks of a scenario file.
    Run {
        file: PathBuf,
        /// Print the machine-readable report instead of tables.
        #[arg(long)]
        json: bool,
        /// Run independent tasks in parallel.
        #[arg(long)]
        parallel: bool,
        /// Size limits, e.g. `carrier=64,order=128,dim=16,presheaves=65536`.
        #[arg(long, env = "DESKCAT_LIMITS")]
        limits: Option<String>,
    },
    /// Check the library properties on a seeded random corpus.
    Selftest {
        #[arg(long, default_value_t = 50)]
        corpus_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where minimized counterexample scenarios are written.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Deliberately break an operation (`convolution-order`, `residuation`).
        #[arg(long = "mutate")]
        mutations: Vec<String>,
        #[arg(long, env = "DESKCAT_LIMITS")]
        limits: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

pub const MUTATIONS: [&str; 2] = ["convolution-order", "residuation"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub carrier: usize,
    pub order: usize,
    pub dim: usize,
    pub presheaves: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { carrier: 64, order: 128, dim: 16, presheaves: 1 << 16 }
    }
}

impl Limits {
    pub fn parse(spec: Option<&str>) -> Result<Self, CliError> {
        let mut l = Limits::default();
        for item in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| CliError::Input(format!("bad limit '{item}'")))?;
            let v: usize = v.trim().parse().map_err(|_| CliError::Input(format!("bad limit value in '{item}'")))?;
            match k.trim() {
                "carrier" => l.carrier = v,
                "order" => l.order = v,
                "dim" => l.dim = v,
                "presheaves" => l.presheaves = v,
                other => return Err(CliError::Input(format!("unknown limit '{other}'"))),
            }
        }
        Ok(l)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Run { file, json, parallel, limits } => Limits::parse(limits.as_deref()).and_then(|l| {
            let text = std::fs::read_to_string(&file).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            let s = scenario::Scenario::parse(&text, l)?;
            let rep = report::run(&s, parallel);
            if json {
                println!("{}", rep.json());
            } else {
                print!("{}", rep.human());
            }
            Ok(rep.exit_code())
        }),
        Command::Selftest { corpus_size, seed, out, mutations, limits } => Limits::parse(limits.as_deref()).and_then(|l| {
            if let Some(m) = mutations.iter().find(|m| !MUTATIONS.contains(&m.as_str())) {
                return Err(CliError::Input(format!("unknown mutation '{m}' (known: {})", MUTATIONS.join(", "))));
            }
            selftest::run(&selftest::Options { size: corpus_size, seed, out, mutations, limits: l })
        }),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
