//! `elliott`: exact Elliott invariants and entropy of time-t maps of
//! suspension flows, driven by JSON documents.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a malformed
//! document or bad usage. Errors are printed as
//! `{"error": <name>, "message": <text>}` on standard output.

mod commands;
mod docs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elliott_core::entropy::DEFAULT_BUDGET;
use serde_json::Value;

use commands::*;
use docs::*;

#[derive(Parser)]
#[command(name = "elliott", version, about = "Elliott invariants and entropy for time-t maps of suspension flows")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a system and report its incidence, Perron data and trace.
    Describe {
        #[arg(long)]
        system: PathBuf,
    },
    /// Elliott invariant of the time-t crossed product.
    Invariant {
        #[arg(long)]
        system: PathBuf,
        /// `p/q`, `sqrtD`, `sqrtD+k`, `c*sqrtD-k`, inline JSON, or a JSON file.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Range of the trace on K₀ as a module.
    TraceRange {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Equality of two trace-range documents (or invariant documents).
    CompareRanges {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Isomorphism of rotation algebras A_t1 and A_t2.
    RotationCompare {
        #[arg(long, allow_hyphen_values = true)]
        t1: String,
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
    },
    /// Compare two invariant documents.
    CompareInvariants {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Verify an isomorphism certificate between two invariant documents.
    CheckCertificate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Exact entropy of the time-t map.
    Entropy {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Separated-set estimate of the entropy of the time-t map.
    EstimateEntropy {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Invariant measure of a cylinder times a fiber interval.
    Measure {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value = "1")]
        b: String,
    },
}

fn system(path: &Path) -> Res<SystemDoc> {
    parse_system(&read_json(path)?)
}

fn rational_arg(s: &str) -> Res<num_rational::BigRational> {
    elliott_core::algebra::rational::parse_rational(s).map_err(|_| CliError::Parse(format!("not a rational: {s:?}")))
}

fn run(command: &Command) -> Res<Value> {
    match command {
        Command::Describe { system: s } => describe(&system(s)?),
        Command::Invariant { system: s, t } => {
            let (sys, t) = (system(s)?, parse_time(t)?);
            invariant(&sys, &t)
        }
        Command::TraceRange { system: s, t } => {
            let (sys, t) = (system(s)?, parse_time(t)?);
            trace_range_report(&sys, &t)
        }
        Command::CompareRanges { a, b } => {
            let (a, b) = (parse_range_doc(&read_json(a)?)?, parse_range_doc(&read_json(b)?)?);
            compare_ranges(&a, &b)
        }
        Command::RotationCompare { t1, t2 } => {
            let (t1, t2) = (parse_time(t1)?, parse_time(t2)?);
            rotation_compare(&t1, &t2)
        }
        Command::CompareInvariants { a, b } => {
            let (a, b) = (parse_invariant_doc(&read_json(a)?)?, parse_invariant_doc(&read_json(b)?)?);
            compare_invariants_report(&load_invariant(&a)?, &load_invariant(&b)?)
        }
        Command::CheckCertificate { a, b, cert } => {
            let (a, b) = (parse_invariant_doc(&read_json(a)?)?, parse_invariant_doc(&read_json(b)?)?);
            let cert = parse_certificate(&read_json(cert)?)?;
            check_certificate(&load_invariant(&a)?, &load_invariant(&b)?, &cert)
        }
        Command::Entropy { system: s, t } => {
            let (sys, t) = (system(s)?, parse_time(t)?);
            entropy(&sys, &t)
        }
        Command::EstimateEntropy { system: s, t, n, eps, budget } => {
            let (sys, t, eps) = (system(s)?, parse_time(t)?, rational_arg(eps)?);
            estimate_entropy(&sys, &t, *n, &eps, *budget)
        }
        Command::Measure { system: s, word, a, b } => {
            let sys = system(s)?;
            let (a, b) = (rational_arg(a)?, rational_arg(b)?);
            let word = parse_measure_word(&sys, word)?;
            measure(&sys, &word, &a, &b)
        }
    }
}

fn emit(doc: &Value, output: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("JSON values serialize") + "\n";
    match output {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(doc) => match emit(&doc, cli.output.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("cannot write report: {e}");
                ExitCode::from(2)
            }
        },
        Err(err) => {
            let _ = emit(&err.to_doc(), None);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
