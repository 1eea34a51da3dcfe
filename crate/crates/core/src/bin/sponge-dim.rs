//! Command-line front end: validate sponge specs, compute ordering sets and
//! dimension bounds, search for dimension gaps and render cylinder layouts.

use clap::{Parser, Subcommand, ValueEnum};
use spongedim::pipeline::{
    run_dims, run_gap, run_orderings, run_render, run_validate, DimsOptions, MeasureChoice,
    Outcome, OracleMode, RenderOutcome, EXIT_PARSE,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sponge-dim", version, about = "dimension bounds for self-affine measures on diagonal sponges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a sponge spec and check the separation conditions.
    Validate {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: orderings, weights, dimension bounds, optional oracle.
    Dims {
        spec: PathBuf,
        /// given | uniform | natural:1,2
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// off | quick | full
        #[arg(long, default_value = "quick")]
        oracle: String,
        /// report formula values even when the separation hypothesis fails
        #[arg(long)]
        formula_only: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ordering sets with certificates.
    Orderings {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the upper bound over weights and emit the gap certificate.
    Gap {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render depth-k cylinder rectangles to SVG.
    Render {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
}

fn read_spec(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_PARSE as u8)
    })
}

fn emit(outcome: Outcome, format: Format, out: Option<PathBuf>) -> ExitCode {
    let body = match format {
        Format::Json => outcome.report.to_json(),
        Format::Text => outcome.report.to_text(),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, body) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => println!("{body}"),
    }
    ExitCode::from(outcome.exit as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { spec, format, out } => {
            let text = match read_spec(&spec) {
                Ok(t) => t,
                Err(c) => return c,
            };
            emit(run_validate(&text), format, out)
        }
        Command::Orderings { spec, format, out } => {
            let text = match read_spec(&spec) {
                Ok(t) => t,
                Err(c) => return c,
            };
            emit(run_orderings(&text), format, out)
        }
        Command::Dims { spec, measure, seed, oracle, formula_only, format, out } => {
            let text = match read_spec(&spec) {
                Ok(t) => t,
                Err(c) => return c,
            };
            let Some(measure) = MeasureChoice::parse(&measure) else {
                eprintln!("unknown measure `{measure}` (use given | uniform | natural:1,2)");
                return ExitCode::from(EXIT_PARSE as u8);
            };
            let Some(oracle) = OracleMode::parse(&oracle) else {
                eprintln!("unknown oracle mode `{oracle}` (use off | quick | full)");
                return ExitCode::from(EXIT_PARSE as u8);
            };
            let opts = DimsOptions { measure, seed, oracle, formula_only };
            emit(run_dims(&text, &opts), format, out)
        }
        Command::Gap { spec, seed, format, out } => {
            let text = match read_spec(&spec) {
                Ok(t) => t,
                Err(c) => return c,
            };
            emit(run_gap(&text, seed), format, out)
        }
        Command::Render { spec, out, depth } => {
            let text = match read_spec(&spec) {
                Ok(t) => t,
                Err(c) => return c,
            };
            match run_render(&text, depth) {
                RenderOutcome::Svg(svg) => {
                    if let Err(e) = std::fs::write(&out, svg) {
                        eprintln!("cannot write {}: {e}", out.display());
                        return ExitCode::FAILURE;
                    }
                    ExitCode::SUCCESS
                }
                RenderOutcome::Failed(outcome) => {
                    eprintln!("{}", outcome.report.to_text());
                    ExitCode::from(outcome.exit as u8)
                }
            }
        }
    }
}
