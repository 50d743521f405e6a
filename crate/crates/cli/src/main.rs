use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use repcount::digit_automata::json::dfao_to_json;
use repcount::digit_automata::{isomorphic, minimize_dfao};
use repcount::linrep::json::linrep_to_json;
use repcount::linrep::{combine, format_rational, minimize_linrep, parse_rational};
use repcount::verify::{self, PipelineOptions, VerificationReport, VerifyError};

#[derive(Parser)]
#[command(name = "repcount", version, about = "Counting representations as sums of elements of a set")]
struct Cli {
    /// Print reports as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce Table 1 and emit r(3,A,n), d(n) as CSV.
    Table1 {
        #[arg(long, default_value_t = 17)]
        horizon: u64,
        /// Write the CSV here ("-" for stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the full automaton pipeline for e(n) and cross-check it.
    Pipeline {
        #[arg(long, default_value_t = verify::DEFAULT_PIPELINE_HORIZON)]
        horizon: u64,
        /// Compare against this automaton instead of the bundled Table 2.
        #[arg(long)]
        table2: Option<PathBuf>,
    },
    /// Check d(n) > 0 for n up to the bound.
    Positivity {
        #[arg(long)]
        upto: u64,
    },
    /// Check the F-power expansion of (1-X)A(X)^k coefficient by coefficient.
    Identity {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "rule:pow2minus1")]
        forbidden: String,
        #[arg(long)]
        horizon: u64,
    },
    /// Growth and positivity data for an arbitrary forbidden set.
    Explore {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        forbidden: String,
        #[arg(long)]
        horizon: u64,
    },
    /// Utilities for automaton files.
    Dfao {
        #[command(subcommand)]
        action: DfaoAction,
    },
    /// Utilities for linear representation files.
    Linrep {
        #[command(subcommand)]
        action: LinrepAction,
    },
}

#[derive(Subcommand)]
enum DfaoAction {
    /// Print the output on each n.
    Eval { file: PathBuf, n: Vec<u64> },
    /// Print the minimized automaton as JSON.
    Minimize { file: PathBuf },
    /// Exit 0 iff the two automata are isomorphic.
    Iso { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand)]
enum LinrepAction {
    /// Print the value on each n.
    Eval { file: PathBuf, n: Vec<u64> },
    /// Print a minimal-rank representation as JSON.
    Minimize { file: PathBuf },
    /// Print ca·a + cb·b as JSON.
    Combine {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        ca: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        cb: String,
    },
}

fn emit(report: &VerificationReport, json: bool) -> bool {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    report.passed
}

fn coefficient(text: &str) -> Result<repcount::linrep::Rational> {
    parse_rational(text).with_context(|| format!("bad coefficient {text:?}"))
}

fn run(cli: Cli) -> Result<bool> {
    let json = cli.json;
    let passed = match cli.command {
        Command::Table1 { horizon, csv } => {
            let (report, table) = verify::cmd_table1(horizon)?;
            match csv.as_deref() {
                Some(p) if p.as_os_str() == "-" => print!("{table}"),
                Some(p) => std::fs::write(p, &table).with_context(|| format!("writing {}", p.display()))?,
                None => {}
            }
            emit(&report, json)
        }
        Command::Pipeline { horizon, table2 } => {
            let run = verify::cmd_pipeline(&PipelineOptions { horizon, table2, ..Default::default() });
            emit(&run.report, json)
        }
        Command::Positivity { upto } => emit(&verify::cmd_positivity(upto)?, json),
        Command::Identity { k, forbidden, horizon } => emit(&verify::cmd_identity(k, &forbidden, horizon)?, json),
        Command::Explore { k, forbidden, horizon } => emit(&verify::cmd_explore(k, &forbidden, horizon)?, json),
        Command::Dfao { action } => match action {
            DfaoAction::Eval { file, n } => {
                let d = verify::read_dfao(&file)?;
                for n in n {
                    println!("{n} {}", d.eval(n));
                }
                true
            }
            DfaoAction::Minimize { file } => {
                println!("{}", dfao_to_json(&minimize_dfao(&verify::read_dfao(&file)?)));
                true
            }
            DfaoAction::Iso { a, b } => {
                let same = isomorphic(&verify::read_dfao(&a)?, &verify::read_dfao(&b)?);
                println!("{}", if same { "isomorphic" } else { "not isomorphic" });
                same
            }
        },
        Command::Linrep { action } => match action {
            LinrepAction::Eval { file, n } => {
                let lr = verify::read_linrep(&file)?;
                for n in n {
                    println!("{n} {}", format_rational(&lr.eval(n)));
                }
                true
            }
            LinrepAction::Minimize { file } => {
                println!("{}", linrep_to_json(&minimize_linrep(&verify::read_linrep(&file)?)));
                true
            }
            LinrepAction::Combine { a, b, ca, cb } => {
                let (a, b) = (verify::read_linrep(&a)?, verify::read_linrep(&b)?);
                let sum = combine(&a, &b, &coefficient(&ca)?, &coefficient(&cb)?)?;
                println!("{}", linrep_to_json(&sum));
                true
            }
        },
    };
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<VerifyError>(), Some(VerifyError::Usage(_))) {
                return ExitCode::from(2);
            }
            ExitCode::FAILURE
        }
    }
}
