use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kkverify::cli::{run_pipeline, Options, Scenario, SCENARIO_SCHEMA, SCHEMA_VERSION};

const _: () = assert!(SCHEMA_VERSION == 1);

/// Exit status for load, schema, and I/O errors.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "kkverify", version = VERSION, about = "Checks the Kaluza-Klein reduction and holonomy chain on a scenario file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a scenario and emit a report.
    Verify {
        /// Scenario JSON file.
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiply every tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the scenario JSON schema.
    Schema,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema 1)");

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Schema => {
            print!("{SCENARIO_SCHEMA}");
            ExitCode::SUCCESS
        }
        Command::Verify {
            scenario,
            format,
            out,
            tolerance_scale,
            seed,
        } => {
            if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
                eprintln!("error: --tolerance-scale must be positive, got {tolerance_scale}");
                return ExitCode::from(EXIT_USAGE);
            }
            let mut s = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}: {e}", scenario.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            if let Some(seed) = seed {
                s = s.with_seed(seed);
            }
            let report = run_pipeline(&s, &Options { tolerance_scale });
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(EXIT_USAGE);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
