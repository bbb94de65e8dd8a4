use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use linresp_cli::{exit_code, run, Overrides, EXIT_ASSERTION};

/// Run one linear-response experiment from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "linresp", version)]
struct Args {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    plot: bool,
    /// Output directory (default: the config's `out`, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid resolution N.
    #[arg(long)]
    resolution: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        resolution: args.resolution,
        plot: args.plot,
    };
    match run(&args.config, &overrides) {
        Ok(report) => {
            for a in &report.assertions {
                println!(
                    "{} {}: {}",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.detail
                );
            }
            for f in &report.csv_files {
                println!("wrote {}", f.display());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
