//! `shtc`: run a configured case or a grid-convergence sweep.

mod config;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use shtc_core::diagnostics::{write_error_csv, ErrorRow};

use config::RunConfig;
use run::SweepOptions;

#[derive(Parser)]
#[command(name = "shtc", version, about = "Two-phase SHTC finite volume solver")]
struct Cli {
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate the config and write the effective setup without integrating.
    #[arg(long, global = true)]
    seed_report: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one case to its final time.
    Run { config: PathBuf },
    /// Grid convergence against an explicit fine-grid reference.
    Sweep {
        config: PathBuf,
        /// Doubling sequence of cell counts, e.g. `64,128,256`.
        #[arg(long, value_delimiter = ',', required = true)]
        grids: Vec<usize>,
        /// Mach pairs `m1:m2`; defaults to the pair in the config.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Vec<(f64, f64)>,
        #[arg(long, default_value_t = 1 << 15)]
        reference_cells: usize,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected m1:m2, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("shtc-out"))
}

fn print_table(rows: &[ErrorRow]) -> Result<()> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    write_error_csv(&mut lock, rows)?;
    lock.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(config)?;
            let out = out_dir(&cli.out, &cfg);
            if cli.seed_report {
                std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
                let seed = run::seed_report(&cfg)?;
                output::write_json(&out.join("seed_report.json"), &seed)?;
                println!("{}", serde_json::to_string_pretty(&seed)?);
                return Ok(());
            }
            let report = run::run(&cfg, &out)?;
            println!(
                "{} steps to t = {:e}; {} snapshot(s) in {}",
                report.steps,
                report.t_final,
                report.snapshots.len(),
                out.display()
            );
        }
        Command::Sweep { config, grids, pairs, reference_cells } => {
            let cfg = RunConfig::load(config)?;
            let out = out_dir(&cli.out, &cfg);
            let opts = SweepOptions { grids: grids.clone(), pairs: pairs.clone(), reference_cells: *reference_cells };
            if cli.seed_report {
                std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
                let seed = run::seed_report(&cfg)?;
                output::write_json(&out.join("seed_report.json"), &seed)?;
                println!("{}", serde_json::to_string_pretty(&seed)?);
                return Ok(());
            }
            let (report, tables) = run::sweep(&cfg, &opts, &out)?;
            for (pair, rows) in report.pairs.iter().zip(&tables) {
                println!("# M1 = {:e}, M2 = {:e}", pair.m1, pair.m2);
                print_table(rows)?;
                if let Some(f) = &pair.failure {
                    println!("# failed at {f}");
                }
            }
            if report.pairs.iter().any(|p| p.failure.is_some()) {
                anyhow::bail!("some sweep runs failed; see {}", out.join("sweep.json").display());
            }
        }
    }
    Ok(())
}
