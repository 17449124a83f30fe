//! Command-line surface for the nilgeo library.
//!
//! Three subcommands: `catalog` recomputes the table of parabolic
//! geometries from the matrix realizations and compares it with the
//! published values, `check` runs the seeded property suites, and
//! `simulate` drives the cocycle-dynamics pipeline on a scenario file.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or parse error.
//! Float output carries 17 significant digits; exact rationals print as
//! `p/q` strings, so identical inputs and seeds give byte-identical JSON.

mod model;
mod simulate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nilgeo::parabolic;
use nilgeo::report::Report;

#[derive(Parser)]
#[command(name = "nilgeo", version, about = "ray nil-affine geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonFlags {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized sweep (scenario files carry their own
    /// default).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for data-parallel sampling (results are identical
    /// for every thread count).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the parabolic-geometry table and compare with the
    /// published values.
    Catalog {
        /// Restrict to one group key (sl3R, sl4R, su21, su31, su22, sustar4).
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Run a property suite with seeded sampling.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Samples per algebra and property.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Run the dynamics pipeline described by a scenario file.
    Simulate {
        /// Path to the scenario JSON.
        path: String,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Bch,
    Split,
    Ray,
    Adjoint,
    All,
}

/// JSON formatter printing every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: std::io::Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: std::io::Write + ?Sized>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn print_json<T: Serialize>(value: &T) {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("report serialization");
    buf.push(b'\n');
    std::io::stdout().write_all(&buf).expect("stdout");
}

fn print_checks_text(report: &Report) {
    for check in &report.checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        print!("{status}  {}", check.name);
        if check.residual != 0.0 {
            print!("  residual {:.3e}", check.residual);
        }
        if let Some(detail) = &check.detail {
            print!("  ({detail})");
        }
        println!();
    }
}

#[derive(Serialize)]
struct CatalogReport {
    command: &'static str,
    rows: Vec<parabolic::Table1Row>,
    pass: bool,
}

fn cmd_catalog(family: Option<&str>, json: bool) -> ExitCode {
    let result = parabolic::table1(family);
    let (rows, report) = match result {
        Ok(ok) => ok,
        Err(nilgeo::Error::UnknownKey(key)) => {
            eprintln!("unknown family key {key:?}; known keys: {}", parabolic::CATALOG.join(", "));
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("catalog computation failed: {e}");
            return ExitCode::from(1);
        }
    };
    let pass = report.pass();
    if json {
        print_json(&CatalogReport { command: "catalog", rows, pass });
    } else {
        println!("{:<10} {:<16} {:>4} {:>6} {:>10} {:>8}", "group", "sigma", "dim", "order", "expected", "status");
        for row in &rows {
            println!(
                "{:<10} {:<16} {:>4} {:>6} {:>10} {:>8}",
                row.group,
                row.sigma_label,
                row.computed_dim,
                row.computed_order,
                format!("({}, {})", row.expected_dim, row.expected_order),
                if row.pass { "PASS" } else { "FAIL" }
            );
        }
        println!("{}", if pass { "all rows PASS" } else { "MISMATCH against the published table" });
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[derive(Serialize)]
struct CheckReport {
    command: &'static str,
    suite: String,
    samples: usize,
    seed: u64,
    checks: Vec<nilgeo::report::Check>,
    pass: bool,
}

fn cmd_check(suite: Suite, samples: usize, seed: u64, json: bool) -> ExitCode {
    let run = |suite: Suite| -> nilgeo::Result<Report> {
        match suite {
            Suite::Bch => nilgeo::suites::suite_bch(samples, seed),
            Suite::Split => nilgeo::suites::suite_split(samples, seed),
            Suite::Ray => nilgeo::suites::suite_ray(samples, seed),
            Suite::Adjoint => nilgeo::suites::suite_adjoint(),
            Suite::All => {
                let mut all = Report::new();
                all.merge(nilgeo::suites::suite_bch(samples, seed)?);
                all.merge(nilgeo::suites::suite_convexity(samples, seed)?);
                all.merge(nilgeo::suites::suite_split(samples, seed)?);
                all.merge(nilgeo::suites::suite_ray(samples, seed)?);
                all.merge(nilgeo::suites::suite_adjoint()?);
                all.merge(nilgeo::suites::suite_fixed_point(samples.min(50).max(5), seed)?);
                Ok(all)
            }
        }
    };
    let label = match suite {
        Suite::Bch => "bch",
        Suite::Split => "split",
        Suite::Ray => "ray",
        Suite::Adjoint => "adjoint",
        Suite::All => "all",
    };
    match run(suite) {
        Ok(report) => {
            let pass = report.pass();
            if json {
                print_json(&CheckReport {
                    command: "check",
                    suite: label.to_string(),
                    samples,
                    seed,
                    checks: report.checks.clone(),
                    pass,
                });
            } else {
                print_checks_text(&report);
                println!("suite {label}: {}", if pass { "PASS" } else { "FAIL" });
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("suite {label} failed to run: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Catalog { common, .. } | Command::Check { common, .. } | Command::Simulate { common, .. } => common,
    };
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match cli.command {
        Command::Catalog { family, common } => cmd_catalog(family.as_deref(), common.json),
        Command::Check { suite, samples, common } => cmd_check(suite, samples, common.seed.unwrap_or(7), common.json),
        Command::Simulate { path, common } => simulate::cmd_simulate(&path, common.json, common.seed),
    }
}
