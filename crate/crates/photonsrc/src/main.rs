use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use photonsrc::{run, CliError, Format, Mode, RunOptions, Scenario};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(
    name = "photonsrc",
    version,
    about = "Single-photon source simulation, histogram fitting and comparison datasets",
    after_help = modes_help()
)]
struct Args {
    /// Scenario file (TOML) selecting the mode and its parameters.
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

fn modes_help() -> String {
    let mut s = String::from("Modes (set with `mode = \"...\"` in the scenario):\n");
    for m in Mode::ALL {
        s.push_str(&format!("  {:<14} {}\n", m.as_str(), m.summary()));
    }
    s.push_str("\nExit status: 0 success, 2 invalid scenario or input file, 3 numerical failure, 4 I/O error.");
    s
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let opts = RunOptions {
        seed: args.seed,
        out: args.out.clone(),
        format: match args.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::JsonLines => Format::JsonLines,
        },
        base_dir: args.scenario.parent().map(PathBuf::from).unwrap_or_default(),
    };
    run(&scenario, &opts)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
