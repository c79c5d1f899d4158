use anyhow::Context;
use clap::{Parser, Subcommand};
use radial_lab::config::parse_assignment;
use radial_lab::{parse_with_overrides, run, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lab", version, about = "Radial Kähler–Einstein laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; reports and `manifest.txt` go to `output_dir`.
    Run {
        /// `key = value` config file; may be omitted when `--set` covers `experiment`
        config: Option<PathBuf>,
        /// Override a config key, e.g. `--set n=2049`
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        overrides: Vec<(String, String)>,
    },
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    parse_assignment(s).ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, overrides } = cli.command;
    let text = match config.as_ref().map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))) {
        None => String::new(),
        Some(Ok(t)) => t,
        Some(Err(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = parse_with_overrides(&text, &overrides)
        .map_err(RunError::from)
        .and_then(|cfg| run(&cfg))
        .and_then(|out| {
            out.status()?;
            Ok(out)
        });
    match result {
        Ok(out) => {
            println!(
                "ok: {} invariants passed in {:.2} s; reports in {}",
                out.report.checks.len(),
                out.wall_time,
                out.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
