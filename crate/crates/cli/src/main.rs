use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use kfrac::config::ExperimentConfig;
use kfrac::experiment::{
    convergence_study, load_config, oracle_comparison, oracle_file, run_experiment, study_file, verify_stored,
    write_study_table, Report, StudyKind, MANIFEST_FILE, REPORT_FILE, VERIFY_REPORT_FILE,
};
use kfrac::Error;

/// Galerkin solver and verification harness for Kirchhoff-type space-time
/// fractional diffusion with memory.
#[derive(Parser)]
#[command(name = "kfrac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, run the configured checks and write tables, report and manifest.
    Run(Common),
    /// Rerun the checks on the coefficient table already in the output directory.
    Verify(Common),
    /// Refine the step count by 1, 2, 4 and 8 and report observed orders.
    Study(Common),
    /// Compare a constant-law, unforced, memoryless run with its exact solution.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML) or a manifest.json from an earlier run.
    config: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run only these checks (comma separated), overriding `[checks] run`.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Print every value behind each verdict.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = load_config(&self.config)?;
        if let Some(dir) = &self.out {
            config.output.dir = dir.clone();
        }
        if let Some(checks) = &self.checks {
            config = config.with_checks(checks)?;
        }
        Ok(config)
    }
}

const STUDY_FACTORS: [usize; 4] = [1, 2, 4, 8];

fn print_report(report: &Report, verbose: u8) {
    if let Some(reason) = &report.failure {
        println!("ABORTED after {} of {} nodes: {reason}", report.nodes_completed, report.nodes_total);
    }
    if verbose > 0 {
        for (k, v) in &report.constants {
            println!("  {k} = {v:e}");
        }
    }
    for r in &report.records {
        let verdict = if r.verdict.passed() { "PASS" } else { "FAIL" };
        let values: Vec<String> = r.values.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        println!("{verdict} {:<13} {}", r.id.as_str(), values.join(" "));
        if verbose > 0 {
            println!("  {}", r.anchor);
            if let Some(note) = &r.note {
                println!("  note: {note}");
            }
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = args.load()?;
            let out = run_experiment(&config)?;
            print_report(&out.report, args.verbose);
            println!("wrote {} and {}", out.dir.join(REPORT_FILE).display(), out.dir.join(MANIFEST_FILE).display());
            Ok(out.success())
        }
        Command::Verify(args) => {
            let config = args.load()?;
            let report = verify_stored(&config)?;
            print_report(&report, args.verbose);
            println!("wrote {}", config.output.dir.join(VERIFY_REPORT_FILE).display());
            Ok(report.success())
        }
        Command::Study(args) => {
            let config = args.load()?;
            let table = convergence_study(&config, &STUDY_FACTORS)?;
            let path = config.output.dir.join(study_file(config.output.format));
            std::fs::create_dir_all(&config.output.dir)?;
            write_study_table(&path, config.output.format, &table)?;
            let kind = match table.kind {
                StudyKind::Oracle => "error vs exact solution",
                StudyKind::SelfConvergence => "self-convergence",
            };
            println!("{kind}{}", if table.degenerate { " (degenerate: errors at round-off)" } else { "" });
            println!("{:>8} {:>12} {:>12} {:>7} {:>7}", "n_steps", "error", "late", "order", "late");
            let fmt = |o: Option<f64>| o.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
            for r in &table.rows {
                println!(
                    "{:>8} {:>12.4e} {:>12.4e} {:>7} {:>7}",
                    r.n_steps,
                    r.error,
                    r.error_late,
                    fmt(r.order),
                    fmt(r.order_late)
                );
            }
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Oracle(args) => {
            let config = args.load()?;
            let s = oracle_comparison(&config)?;
            let verdict = if s.pass { "PASS" } else { "FAIL" };
            println!(
                "{verdict} max_abs={:.6e} max_abs_late={:.6e} tolerance={:e} window={:?}",
                s.max_abs, s.max_abs_late, s.tolerance, s.window
            );
            println!("wrote {}", config.output.dir.join(oracle_file(config.output.format)).display());
            Ok(s.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli).context("kfrac") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::Config(list)) => {
                    eprintln!("invalid configuration ({} problems):", list.len());
                    for item in list {
                        eprintln!("  - {item}");
                    }
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
