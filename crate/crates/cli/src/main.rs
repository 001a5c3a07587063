//! `bbl-lab`: desk-scale verification of discrete Brunn-Minkowski and
//! Borell-Brascamp-Lieb type inequalities.
//!
//! Exit codes: 0 every asserted check passed; 1 I/O, parse, or validation
//! error; 2 an asserted inequality failed; 3 a hypothesis (hyperplane
//! non-degeneracy) was not met, so nothing was asserted.

mod commands;

use anyhow::Result;
use bbl_core::rational::{parse_ratio, Rational};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use commands::CampaignMode;
use bbl_lab::report::ReportFile;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "bbl-lab", version, about = "Discrete Brunn-Minkowski / Borell-Brascamp-Lieb inequality lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also write per-record rows as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the hyperplane-gated lower bound Σh ≥ (2^d - ε)·Σf on an
    /// instance file.
    Verify {
        instance: PathBuf,
        /// Mean exponent (defaults to the instance's, then 1/4).
        #[arg(long)]
        p: Option<f64>,
        /// Mean weight (defaults to the instance's, then 1/2).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Number of heaviest hyperplanes allowed to concentrate mass.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Coefficient bound for the primitive-normal scan.
        #[arg(long, default_value_t = 5)]
        direction_bound: i64,
    },
    /// Generate the atom-plus-box tightness family and check its identities.
    Extremal {
        /// Atom weight in (0,1), e.g. `1/4`.
        #[arg(long, value_parser = parse_ratio)]
        gamma: Rational,
        /// Box side length N.
        #[arg(long = "box-side", default_value_t = 16)]
        box_side: u32,
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Run a seeded random campaign; deterministic for a fixed seed.
    Campaign {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "support-max", default_value_t = 20)]
        support_max: usize,
        /// Mean exponent; defaults to cycling {1/4, 1/2, 1} per trial.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, value_enum)]
        mode: CampaignMode,
        /// Lifting domain for `--mode lift`.
        #[arg(long, default_value = "zd-add")]
        domain: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        direction_bound: i64,
    },
    /// Diagnostic sumset sizes and deficit for an instance's supports.
    Sumset { instance: PathBuf },
    /// Validate a stored report and restate its summary.
    Report { report: PathBuf },
}

fn run(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let mut report = match &cli.command {
        Command::Verify {
            instance,
            p,
            lambda,
            epsilon,
            n,
            direction_bound,
        } => commands::cmd_verify(instance, *p, *lambda, *epsilon, *n, *direction_bound)?,
        Command::Extremal {
            gamma,
            box_side,
            p,
            d,
            epsilon,
            n,
        } => commands::cmd_extremal(gamma, *box_side, *p, *d, *epsilon, *n)?,
        Command::Campaign {
            seed,
            trials,
            d,
            support_max,
            p,
            lambda,
            mode,
            domain,
            epsilon,
            n,
            direction_bound,
        } => commands::cmd_campaign(
            *seed,
            *trials,
            *d,
            *support_max,
            *p,
            *lambda,
            *mode,
            domain,
            *epsilon,
            *n,
            *direction_bound,
        )?,
        Command::Sumset { instance } => commands::cmd_sumset(instance)?,
        Command::Report { report } => {
            let stored = commands::cmd_report(report)?;
            print_summary(&stored);
            return Ok(stored.exit_code());
        }
    };
    report.timing_ms = started.elapsed().as_millis();
    report.emit(cli.out.as_deref())?;
    if let Some(csv) = &cli.csv {
        report.write_csv(csv)?;
    }
    print_summary(&report);
    Ok(report.exit_code())
}

fn print_summary(report: &ReportFile) {
    eprintln!(
        "{}: {} ({} pass, {} fail, {} hypothesis-not-met; worst margin {:.3e})",
        report.command,
        report.summary.overall,
        report.summary.passes,
        report.summary.failures,
        report.summary.hypothesis_not_met,
        report.summary.worst_margin,
    );
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
