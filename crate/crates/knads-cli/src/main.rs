use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use knads_cli::commands::{self, Format};
use knads_cli::{exit_code, RunConfig};

#[derive(Parser)]
#[command(name = "knads", version, about = "Dirac spectra on Kerr-Newman-AdS backgrounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Csv)]
    format: Fmt,
    /// Worker threads for the parallel solvers.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cross-check eigenvalues against the finite-difference oracle.
    #[arg(long, global = true)]
    oracle: bool,
    /// Override the gauge parameter b from the config.
    #[arg(long = "gauge-b", global = true, allow_hyphen_values = true)]
    gauge_b: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Horizon radii, extremality and Komar charges
    Horizons,
    /// Extremal mass for the configured a, charges and l
    Extremal,
    /// Limit-point/limit-circle verdict at each endpoint
    Classify,
    /// Angular eigenvalues in the configured window
    Angular,
    /// Radial eigenvalues with a cutoff at infinity, plus horizon certificates
    Radial,
    /// Coupled (omega, lambda) scan for normalizable modes
    Scan,
    /// Tortoise coordinates y(r) and x(r)
    Tortoise,
}

#[derive(ValueEnum, Clone, Copy)]
enum Fmt {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    let Some(path) = cli.config.as_ref() else {
        eprintln!("error: --config is required");
        return ExitCode::from(2);
    };
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(b) = cli.gauge_b {
        cfg.gauge_b = b;
    }
    let fmt = match cli.format {
        Fmt::Csv => Format::Csv,
        Fmt::Json => Format::Json,
    };
    let res = match cli.cmd {
        Cmd::Horizons => commands::cmd_horizons(&cfg, fmt),
        Cmd::Extremal => commands::cmd_extremal(&cfg, fmt),
        Cmd::Classify => commands::cmd_classify(&cfg, fmt),
        Cmd::Angular => commands::cmd_angular(&cfg, fmt, cli.oracle),
        Cmd::Radial => commands::cmd_radial(&cfg, fmt, cli.oracle),
        Cmd::Scan => commands::cmd_scan(&cfg, fmt),
        Cmd::Tortoise => commands::cmd_tortoise(&cfg, fmt),
    };
    let code = exit_code(&res);
    match res {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &out.body),
                None => std::io::stdout().write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(3);
            }
            if let Some(v) = &out.verdict {
                // keep stdout clean when it carries the table
                if cli.out.is_some() {
                    println!("verdict: {v}");
                } else {
                    eprintln!("verdict: {v}");
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
