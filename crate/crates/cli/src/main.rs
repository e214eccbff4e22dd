mod query;
mod render;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cusp_core::{CuspEngine, NodalOracle, OracleTable};

use crate::query::QueryArgs;
use crate::table::TableArgs;

#[derive(Parser)]
#[command(
    name = "cuspidal",
    version,
    about = "Characteristic numbers of rational cuspidal curves in P^r"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single count.
    Query(QueryArgs),
    /// Tabulate cusp counts by tangency (rows) and cusp condition (columns).
    Table(TableArgs),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Nodal count table (text or JSON); repeatable.
    #[arg(long = "oracle", value_name = "FILE")]
    pub oracles: Vec<PathBuf>,
    /// Persistent cache of Gromov-Witten invariants.
    #[arg(long, value_name = "FILE")]
    pub cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Use the computed two-component formula outside the plane.
    #[arg(long = "experimental-rr2-general-r")]
    pub experimental_rr2: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Markdown,
    Json,
}

/// Failures mapped to exit codes: 2 for bad input, 3 for missing oracle
/// data, 4 for internal inconsistencies.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error(transparent)]
    Engine(#[from] cusp_core::Error),
}

impl CliError {
    pub fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        use cusp_core::Error as E;
        match self {
            CliError::Usage { .. } => 2,
            CliError::Engine(E::OracleMissing { .. }) => 3,
            CliError::Engine(E::Inconsistent(_)) => 4,
            CliError::Engine(_) => 2,
        }
    }
}

fn build_engine(common: &Common) -> Result<CuspEngine, CliError> {
    let mut table = OracleTable::new();
    for path in &common.oracles {
        table.load_into(path)?;
    }
    let engine =
        CuspEngine::new(NodalOracle::new(table).with_experimental_rr2(common.experimental_rr2));
    if let Some(cache) = &common.cache {
        engine.nodal().gw().load(cache)?;
    }
    Ok(engine)
}

fn save_cache(engine: &CuspEngine, common: &Common) -> Result<(), CliError> {
    if let Some(cache) = &common.cache {
        engine.nodal().gw().save(cache)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, (CliError, Format)> {
    match cli.command {
        Command::Query(args) => {
            let fmt = args.common.format;
            let q = args.to_query().map_err(|e| (e, fmt))?;
            let engine = build_engine(&args.common).map_err(|e| (e, fmt))?;
            let value = engine.evaluate(&q).map_err(CliError::from);
            save_cache(&engine, &args.common).map_err(|e| (e, fmt))?;
            let value = value.map_err(|e| (e, fmt))?;
            Ok(render::value(&q, &value, fmt))
        }
        Command::Table(args) => {
            let fmt = args.common.format;
            let engine = build_engine(&args.common).map_err(|e| (e, fmt))?;
            let grid = args.evaluate(&engine).map_err(|e| (e, fmt))?;
            save_cache(&engine, &args.common).map_err(|e| (e, fmt))?;
            if let Some(err) = grid.inconsistency() {
                return Err((CliError::Engine(cusp_core::Error::Inconsistent(err)), fmt));
            }
            Ok(render::table(&grid, fmt))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err((err, fmt)) => {
            if fmt == Format::Json {
                let _ = writeln!(stdout, "{}", render::error_json(&err));
            }
            match &err {
                CliError::Engine(cusp_core::Error::OracleMissing { keys }) => {
                    eprintln!("error: oracle data missing for {} key(s):", keys.len());
                    for key in keys {
                        eprintln!("  {key}");
                    }
                }
                _ => eprintln!("error: {err}"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
