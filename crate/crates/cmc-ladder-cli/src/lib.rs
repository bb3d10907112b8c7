//! Command-line front end for `cmc-ladder`.
//!
//! Every subcommand builds a [`report::Report`]: a list of named checks plus
//! a data block. The report is printed as a table (or as JSON with
//! `--json`), optionally written to `--out`, and the process exits nonzero
//! when any check fails.

pub mod cache;
pub mod codec;
pub mod commands;
pub mod error;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use error::{CliError, CliResult};
pub use report::Report;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug, Clone)]
#[command(name = "cmc-ladder", version, about = "Jacobi fields and conservation laws of CMC surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON artifact to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print JSON on stdout instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Algebraic,
    Integration,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyCheck {
    Jacobi,
    Weights,
    Closedness,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build the Jacobi field ladder and check every level.
    Hierarchy {
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Re-check a hierarchy artifact written by `hierarchy --out`.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "jacobi,weights,closedness")]
        checks: Vec<VerifyCheck>,
    },
    /// Closedness and non-exactness of the conservation laws.
    Cvlaws {
        #[arg(long, default_value_t = 4)]
        max_n: u32,
        #[arg(long, default_value_t = 2)]
        exact_up_to: u32,
    },
    /// Residue and pole orders at an umbilic of order p.
    Umbilic {
        #[arg(long)]
        p: u32,
        /// Truncation order of the local expansions.
        #[arg(long)]
        order: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value = "3/2")]
        gamma: String,
    },
    /// Structure equations, Killing field and spectral data of a finite type relation.
    FiniteType {
        #[arg(long)]
        level: u32,
        /// JSON file with `U`, `V` and optionally `normalization`.
        #[arg(long)]
        constants: PathBuf,
        /// JSON file with `gamma`, `r`, `A` and `B`; a seeded state otherwise.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Integrate the frame along a path of this length.
        #[arg(long)]
        integrate: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Integrate the flat 3-web and report its residuals.
    Simulate {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        length: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
    /// The deformation forms and the deformed Killing rows.
    Deform {
        #[arg(long, default_value_t = 3)]
        max_j: u32,
    },
    /// The dictionary from jet coordinates to the sinh-Gordon jets.
    PdeBridge {
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
}

/// Runs one parsed invocation without touching the process streams.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    commands::dispatch(&cli.command)
}

/// Full driver: cache, subcommand, artifact, output. Returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cache_path = cache::path_from_env();
    if let Some(p) = &cache_path {
        match cache::load(p) {
            Ok(o) => {
                if let Some(j) = o.rejected_at {
                    let _ = writeln!(stderr, "warning: cache entry T{} failed verification; later entries ignored", j);
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "warning: cache not loaded: {}", e);
            }
        }
    }
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            let v = json!({
                "schema": report::SCHEMA,
                "command": commands::name(&cli.command),
                "failures": [{ "id": e.id(), "detail": e.to_string() }],
            });
            let _ = writeln!(stderr, "{}", v);
            return 2;
        }
    };
    if let Some(p) = &cache_path {
        if let Err(e) = cache::store(p) {
            let _ = writeln!(stderr, "warning: cache not written: {}", e);
        }
    }
    let artifact = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    if let Some(out) = &cli.out {
        if let Err(source) = std::fs::write(out, format!("{}\n", artifact)) {
            let e = CliError::Io { path: out.clone(), source };
            let _ = writeln!(stderr, "{}", json!({"schema": report::SCHEMA, "failures": [{"id": e.id(), "detail": e.to_string()}]}));
            return 2;
        }
    }
    if cli.json {
        let _ = writeln!(stdout, "{}", artifact);
    } else {
        let _ = write!(stdout, "{}", report.to_table());
    }
    if report.passed() {
        0
    } else {
        let _ = writeln!(stderr, "{}", report.failure_json());
        1
    }
}
