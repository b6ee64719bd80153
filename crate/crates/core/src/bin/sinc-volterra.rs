use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sinc_volterra::bench::{
    compare_collocation_nodes, emit_csv, parse_csv, report_slopes, run_sweep, ProblemRegistry,
    SweepConfig, DEFAULT_PROBE_POINTS,
};
use sinc_volterra::{Error, Method};

/// Benchmarks for Sinc solvers of Volterra integral equations.
#[derive(Parser)]
#[command(name = "sinc-volterra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for each N and write error and timing rows as CSV.
    Sweep {
        /// se-nystrom, de-nystrom, se-colloc, rz-colloc or de-colloc.
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// Problem identifier: rz4 or pm45.
        #[arg(long)]
        problem: String,
        /// Strictly increasing comma-separated list of N.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Equally spaced points on [a, b], both endpoints included.
        #[arg(long, default_value_t = DEFAULT_PROBE_POINTS)]
        probe_points: usize,
        /// Override the strip half-width d for the method's transform.
        #[arg(long)]
        d: Option<f64>,
        /// Override the decay rate alpha for the method's transform.
        #[arg(long)]
        alpha: Option<f64>,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the N values sequentially so timings are not disturbed.
        #[arg(long)]
        timed: bool,
    },
    /// Fit convergence slopes to a sweep CSV.
    Slopes {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Compare SE-Sinc-collocation and bordered collocation at the Sinc nodes.
    VerifyTheorem4 {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        n: usize,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(command: Command) -> Result<(), Error> {
    let registry = ProblemRegistry::default();
    match command {
        Command::Sweep {
            method,
            problem,
            n_list,
            probe_points,
            d,
            alpha,
            out,
            timed,
        } => {
            let config = SweepConfig {
                method,
                problem_id: problem,
                n_list,
                probe_points,
                d_override: d,
                alpha_override: alpha,
                timed,
            };
            let records = run_sweep(&registry, &config)?;
            for r in &records {
                match &r.failure {
                    Some(msg) => eprintln!(
                        "{} {} N={}: failed: {msg}",
                        r.method, r.problem_id, r.truncation
                    ),
                    None => eprintln!(
                        "{} {} N={:<4} h={:.6} max_error={:.3e}",
                        r.method, r.problem_id, r.truncation, r.h, r.max_error
                    ),
                }
            }
            match out {
                Some(path) => emit_csv(&records, BufWriter::new(File::create(path)?))?,
                None => emit_csv(&records, io::stdout().lock())?,
            }
            let failed = records.iter().filter(|r| r.failure.is_some()).count();
            if failed > 0 {
                return Err(Error::Problem(format!(
                    "{failed} of {} solves failed",
                    records.len()
                )));
            }
        }
        Command::Slopes { input } => {
            let records = parse_csv(BufReader::new(File::open(input)?))?;
            let report = report_slopes(&registry, &records)?;
            io::stdout().lock().write_all(report.as_bytes())?;
        }
        Command::VerifyTheorem4 { problem, n } => {
            if n == 0 {
                return Err(Error::Usage("N must be positive".into()));
            }
            let p = registry.get(&problem)?;
            let cmp = compare_collocation_nodes(p, n)?;
            println!(
                "max node discrepancy {:.3e} (tolerance {:.3e}); endpoint gap {:.3e}",
                cmp.max_discrepancy,
                cmp.tolerance(),
                cmp.endpoint_gap
            );
            if !cmp.coincide() {
                return Err(Error::Problem("node values do not coincide".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
