use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loglocal_core::fault::{self, Fault};
use loglocal_core::Error;

mod commands;

use commands::{Outcome, Table};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "loglocal", version, about = "Log and local Gromov-Witten invariants of nef toric pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize and validate a geometry.
    Describe(Common),
    /// Log invariants Rp, Rq: closed forms and tropical multiplicities.
    Log(Common),
    /// Local invariants p, q from the I-function.
    Local(Common),
    /// Check the log-local correspondence; exits 1 on any mismatch.
    Verify(Common),
    /// Sweep the built-in fleet of geometries.
    Selftest(SelftestArgs),
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Geometry config (JSON).
    #[arg(long)]
    geometry: PathBuf,
    /// Degree bound, a scalar applied to every factor or one entry per factor.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    dmax: Vec<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(clap::Args, Debug)]
struct SelftestArgs {
    /// Degree bound per factor.
    #[arg(long, default_value_t = 4)]
    dmax: u64,
    #[command(flatten)]
    output: OutputArgs,
    /// Inject a deliberate sign error to check that it is caught.
    #[arg(long, hide = true, default_value = "none")]
    inject_fault: Fault,
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failure reported as structured JSON on standard error. Input and
/// configuration problems exit with 2, engine inconsistencies with 1.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub path: Option<String>,
    pub message: String,
    pub details: Option<serde_json::Value>,
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            path: None,
            message: message.into(),
            details: None,
        }
    }

    fn status(&self) -> u8 {
        if self.kind == "engine" {
            1
        } else {
            2
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, path) = match &e {
            Error::Config { path, .. } => ("config", Some(path.clone())),
            Error::InvalidGeometry(_) | Error::NotWellFormed { .. } => ("geometry", None),
            Error::BadDegree(_) => ("input", None),
            _ => ("engine", None),
        };
        let message = match &e {
            Error::Config { reason, .. } => reason.clone(),
            other => other.to_string(),
        };
        let details = match &e {
            Error::InvalidGeometry(v) => serde_json::to_value(v).ok(),
            _ => None,
        };
        CliError {
            kind,
            path,
            message,
            details,
        }
    }
}

fn render(table: &Table, format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(&table.json)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            Ok(w.into_inner()?)
        }
    }
}

fn emit(outcome: &Outcome, output: &OutputArgs) -> anyhow::Result<()> {
    let bytes = render(&outcome.table, output.format)?;
    match &output.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn report_error(e: &CliError) {
    let body = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": e.kind, "path": e.path, "message": e.message, "details": e.details },
    });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.command {
        Command::Describe(c) => (commands::describe(&c.geometry), &c.output),
        Command::Log(c) => (commands::log(&c.geometry, &c.dmax), &c.output),
        Command::Local(c) => (commands::local(&c.geometry, &c.dmax), &c.output),
        Command::Verify(c) => (commands::verify(&c.geometry, &c.dmax), &c.output),
        Command::Selftest(s) => {
            fault::inject(s.inject_fault);
            (commands::selftest(s.dmax), &s.output)
        }
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            report_error(&e);
            return ExitCode::from(e.status());
        }
    };
    if let Err(e) = emit(&outcome, output) {
        eprintln!("loglocal: {e:#}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
