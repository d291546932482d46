use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use degenflow::{execute, load_config, CliError, ExperimentKind, Override};

/// Runs one degenflow experiment and writes its reports.
///
/// Exit status: 0 when every verdict holds, 1 when one fails, 2 on errors
/// (printed to stderr as JSON).
#[derive(Debug, Parser)]
#[command(name = "degenflow", version)]
struct Args {
    kind: ExperimentKind,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key=value` with a dotted key, e.g. `solver.final_time=0.5`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(args: &Args) -> Result<bool, CliError> {
    let overrides = args.overrides.iter().map(|s| s.parse()).collect::<Result<Vec<Override>, _>>()?;
    let cfg = load_config(&args.config, &overrides)?.with_kind(args.kind)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let record = execute(&cfg, &out)?;
    println!(
        "{}",
        serde_json::json!({
            "kind": args.kind.name(),
            "pass": record.pass,
            "out": out.display().to_string(),
            "files": record.files,
            "summary": record.summary,
        })
    );
    Ok(record.pass)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
