//! `ncdg`: command-line driver for the noncommutative geometry toolkit.
//!
//! Every run writes `<out-dir>/<subcommand>.json` and prints the same report
//! on stdout. Exit status is 0 on success, 1 when a computation fails or an
//! enforced residual exceeds its tolerance, 2 on bad input.

mod commands;
mod inputs;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::GridArgs;
use inputs::{BundleDescriptor, YmhConfig};
use report::{CliError, Outcome, Report, Tolerances};

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(name = "ncdg", version, about = "Noncommutative differential geometry on matrix algebras")]
struct Cli {
    /// Directory receiving the JSON report and any CSV trace.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Seed for every random choice (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,

    /// Override a named tolerance, e.g. `--tolerance curvature=1e-10`.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generalized Gell-Mann basis of su(n) with structure constants and metric.
    Basis {
        #[arg(long)]
        n: usize,
    },
    /// Dimensions of the cohomology of the derivation complex of M_n.
    Cohomology {
        #[arg(long)]
        n: usize,
        /// Include orthonormal representatives of each cohomology space.
        #[arg(long)]
        representatives: bool,
    },
    /// Curvature of a connection on the free module M_{r,n}.
    Curvature {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// JSON file `{"components": [matrix, ...]}`.
        #[arg(long)]
        connection: PathBuf,
    },
    /// Gauge orbits of flat connections on M_{r,2}.
    ClassifyFlat {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Gradient descent for Yang-Mills-Higgs vacua on a periodic lattice.
    YmhMinimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Gluing, horizontality and gauge covariance checks on a nontrivial bundle.
    BundleCheck {
        #[arg(long)]
        descriptor: PathBuf,
    },
    /// Characteristic forms of a split Lie algebra extension.
    Lecomte {
        #[arg(long)]
        sequence: PathBuf,
        /// Polynomial degree; all admissible degrees when omitted.
        #[arg(long)]
        q: Option<usize>,
        /// Number of random splittings compared with the canonical one.
        #[arg(long, default_value_t = 3)]
        splittings: usize,
    },
    /// Chern-Weil number of an analytic gauge field.
    Chern {
        #[arg(long)]
        field: PathBuf,
        /// Degree of the Chern form; half the base dimension when omitted.
        #[arg(long)]
        q: Option<usize>,
        /// Radius of the integration ball; 20 field scales when omitted.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 400)]
        cells: usize,
    },
    /// Centralizer and invariant maps of a symmetric reduction datum.
    Reduce {
        #[arg(long)]
        data: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Basis { .. } => "basis",
            Command::Cohomology { .. } => "cohomology",
            Command::Curvature { .. } => "curvature",
            Command::ClassifyFlat { .. } => "classify-flat",
            Command::YmhMinimize { .. } => "ymh-minimize",
            Command::BundleCheck { .. } => "bundle-check",
            Command::Lecomte { .. } => "lecomte",
            Command::Chern { .. } => "chern",
            Command::Reduce { .. } => "reduce",
        }
    }

    fn tolerance_defaults(&self) -> &'static [(&'static str, f64)] {
        match self {
            Command::Basis { .. } => commands::BASIS_TOLS,
            Command::Cohomology { .. } => commands::COHOMOLOGY_TOLS,
            Command::Curvature { .. } => commands::CURVATURE_TOLS,
            Command::ClassifyFlat { .. } => commands::FLAT_TOLS,
            Command::YmhMinimize { .. } => commands::YMH_TOLS,
            Command::BundleCheck { .. } => commands::BUNDLE_TOLS,
            Command::Lecomte { .. } => commands::LECOMTE_TOLS,
            Command::Chern { .. } => commands::CHERN_TOLS,
            Command::Reduce { .. } => commands::REDUCE_TOLS,
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("NCDG_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::usage(format!("NCDG_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot configure the thread pool: {e}")))
}

/// Runs the subcommand and returns the config echo with its outcome.
fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<(Value, Outcome), CliError> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let path = |p: &Path| p.display().to_string();
    Ok(match &cli.command {
        Command::Basis { n } => (json!({ "n": n }), commands::basis(*n, tol)?),
        Command::Cohomology { n, representatives } => (
            json!({ "n": n, "representatives": representatives }),
            commands::cohomology(*n, *representatives, tol)?,
        ),
        Command::Curvature { n, connection } => (
            json!({ "n": n, "connection": path(connection) }),
            commands::curvature(*n, connection, tol)?,
        ),
        Command::ClassifyFlat { r, n } => (json!({ "r": r, "n": n }), commands::classify_flat(*n, *r, tol)?),
        Command::YmhMinimize { config } => {
            let cfg: YmhConfig = inputs::read_json(config)?;
            let seed = cfg.seed.unwrap_or(seed);
            let echo = json!({ "config": path(config), "seed": seed, "parameters": serde_json::to_value(&cfg)? });
            (echo, commands::ymh_minimize(&cfg, seed, tol)?)
        }
        Command::BundleCheck { descriptor } => {
            let desc: BundleDescriptor = inputs::read_json(descriptor)?;
            let echo =
                json!({ "descriptor": path(descriptor), "seed": seed, "parameters": serde_json::to_value(&desc)? });
            (echo, commands::bundle_check(&desc, seed, tol)?)
        }
        Command::Lecomte { sequence, q, splittings } => (
            json!({ "sequence": path(sequence), "q": q, "splittings": splittings, "seed": seed }),
            commands::lecomte(sequence, *q, *splittings, seed, tol)?,
        ),
        Command::Chern { field, q, r_max, cells } => (
            json!({ "field": path(field), "q": q, "r_max": r_max, "cells": cells }),
            commands::chern(field, *q, &GridArgs { r_max: *r_max, cells: *cells }, tol)?,
        ),
        Command::Reduce { data } => (json!({ "data": path(data) }), commands::reduce(data, tol)?),
    })
}

fn write_trace(path: &Path, rows: &[(usize, f64, f64)]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["step", "action", "gradient_norm"]).map_err(io)?;
    for (step, action, grad) in rows {
        w.write_record([step.to_string(), action.to_string(), grad.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let name = cli.command.name();
    let tol = Tolerances::resolve(cli.command.tolerance_defaults(), &cli.tolerances)?;
    let (config, outcome) = dispatch(cli, &tol)?;
    let passed = outcome.passed();
    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    if let Some(rows) = &outcome.trace {
        write_trace(&cli.out_dir.join(format!("{name}.trace.csv")), rows)?;
    }
    let report = Report {
        tool: "ncdg",
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        config,
        tolerances: tol.as_map(),
        result: &outcome.result,
        checks: &outcome.checks,
        failure: outcome.failure.as_deref(),
        passed,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    let target = cli.out_dir.join(format!("{name}.json"));
    std::fs::write(&target, &text).map_err(|e| CliError::io(format!("cannot write {}: {e}", target.display())))?;
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(format!("cannot write to stdout: {e}")))?;
    Ok(passed)
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&err.to_json()).unwrap_or_else(|_| err.message.clone()));
    ExitCode::from(err.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::usage(e.render().to_string()));
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
