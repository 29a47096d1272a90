use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gluedforms::cli::{run, CliError, Options, COMMANDS};

/// Run a command on a scene file and print a JSON report.
#[derive(Parser, Debug)]
#[command(name = "gluedforms", version)]
struct Cli {
    /// Scene file.
    scene: std::path::PathBuf,
    /// One of: check-compat, glue-form, eval-form, fibre, oracle, rho,
    /// check-metric-compat, glue-metric, gram-rank.
    command: String,
    /// Command arguments, e.g. `GX at P2:(0,5)`.
    args: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation degree for `oracle`.
    #[arg(long)]
    degree: Option<u32>,
    /// Sample count for the metric checks.
    #[arg(long)]
    samples: Option<usize>,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output instead of JSON.
    #[arg(long)]
    text: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let defaults = Options::default();
    let opts = Options {
        seed: cli.seed,
        degree: cli.degree.unwrap_or(defaults.degree),
        samples: cli.samples.unwrap_or(defaults.samples),
    };
    let text = match std::fs::read_to_string(&cli.scene) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("gluedforms: cannot read {}: {}", cli.scene.display(), e);
            return ExitCode::from(2);
        }
    };
    match run(&text, &cli.command, &cli.args, &opts) {
        Ok(report) => {
            let out = if cli.text {
                report.to_text()
            } else {
                report.to_json() + "\n"
            };
            // ignore a closed pipe
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gluedforms: {}", e);
            if let CliError::Usage(_) = e {
                eprintln!("commands: {}", COMMANDS.join(", "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
