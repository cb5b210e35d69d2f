use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pure_measure_cli::{parse_config, run};

/// Run density-measure probes described by a JSON configuration.
#[derive(Debug, Parser)]
#[command(name = "pure-measure", version)]
struct Args {
    /// Configuration file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory for report.json and the CSV series.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured samples per δ-level.
    #[arg(long)]
    samples: Option<usize>,
    /// Run only the named task; repeatable.
    #[arg(long = "task")]
    tasks: Vec<String>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        if samples == 0 {
            eprintln!("error: --samples must be at least 1");
            return ExitCode::from(1);
        }
        config.samples = samples;
    }
    match run(&config, &args.out, &args.tasks) {
        Ok(report) => {
            for t in &report.tasks {
                match &t.error {
                    None => println!("{:<24} {:<20} ok", t.name, t.kind),
                    Some(e) => println!("{:<24} {:<20} error: {e}", t.name, t.kind),
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
