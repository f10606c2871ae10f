//! charslope command-line interface.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 theorem violation,
//! 3 input outside the supported regime.

use charslope::error::Error;
use charslope::session::{
    self, parse_input, run_analyze, run_blowup, run_clean, run_pipeline, run_resolve,
    run_resolve_monomial, run_verify, to_state,
};
use charslope::verify::SUITES;
use clap::{Parser, Subcommand};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "charslope", version, about = "Exact slope invariants for p-presentations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Slope, adaptation case, and singular locus at coordinate points
    Analyze {
        input: PathBuf,
        /// Comma-separated variables of a single coordinate point
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run cleaning passes at a point until the presentation is adapted
    Clean {
        input: PathBuf,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Transform the presentation under a single permissible blow-up
    Blowup {
        input: PathBuf,
        /// Comma-separated center, e.g. z,x,y
        #[arg(long)]
        center: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the full resolution driver
    Resolve {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Resolve the divisor ledger combinatorially
    ResolveMonomial {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a randomized verification suite
    Verify {
        input: PathBuf,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Execute the ordered command script embedded in the input
    Pipeline {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::TheoremViolation(_) => 2,
        Error::OutOfScope(_) | Error::Degenerate(_) => 3,
        _ => 1,
    }
}

fn effective_seed(flag: u64) -> u64 {
    match std::env::var("CHARSLOPE_SEED") {
        Ok(v) => v.parse().unwrap_or_else(|_| {
            eprintln!("charslope: ignoring non-numeric CHARSLOPE_SEED {:?}", v);
            flag
        }),
        Err(_) => flag,
    }
}

fn emit(value: &Value, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).unwrap());
    } else {
        print!("{}", session::render_text(value));
    }
}

fn load(path: &PathBuf) -> Result<session::SessionInput, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_input(&text)
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',')
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect()
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.cmd {
        Cmd::Analyze { input, point, json } => {
            let s = load(&input)?;
            let state = to_state(&s)?;
            let pt = match point {
                Some(names) => Some(session::parse_point(&state, &split_names(&names))?),
                None => None,
            };
            emit(&run_analyze(&state, pt.as_ref())?, json);
            Ok(true)
        }
        Cmd::Clean { input, point, json } => {
            let s = load(&input)?;
            let state = to_state(&s)?;
            let pt = match point {
                Some(names) => Some(session::parse_point(&state, &split_names(&names))?),
                None => None,
            };
            let (_, value) = run_clean(&state, pt.as_ref())?;
            emit(&value, json);
            Ok(true)
        }
        Cmd::Blowup { input, center, json } => {
            let s = load(&input)?;
            let state = to_state(&s)?;
            let c = session::parse_center(&state, &split_names(&center))?;
            let (_, value) = run_blowup(&state, &c)?;
            emit(&value, json);
            Ok(true)
        }
        Cmd::Resolve { input, json } => {
            let s = load(&input)?;
            let state = to_state(&s)?;
            emit(&run_resolve(&state)?, json);
            Ok(true)
        }
        Cmd::ResolveMonomial { input, json } => {
            let s = load(&input)?;
            let state = to_state(&s)?;
            emit(&run_resolve_monomial(&state)?, json);
            Ok(true)
        }
        Cmd::Verify {
            input,
            suite,
            seed,
            count,
            json,
        } => {
            let s = load(&input)?;
            to_state(&s)?;
            if !SUITES.contains(&suite.as_str()) {
                return Err(Error::Precondition(format!(
                    "unknown suite {:?}; available: {}",
                    suite,
                    SUITES.join(", ")
                )));
            }
            let (value, ok) = run_verify(&suite, effective_seed(seed), count)?;
            emit(&value, json);
            if !ok {
                eprintln!("charslope: suite {:?} reported failures", suite);
            }
            Ok(ok)
        }
        Cmd::Pipeline { input, json } => {
            let s = load(&input)?;
            let (value, ok) = run_pipeline(&s)?;
            emit(&value, json);
            if !ok {
                eprintln!("charslope: pipeline reported verification failures");
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        // a suite failure is a refuted theorem instance
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("charslope: {}", err);
            ExitCode::from(exit_code_for(&err))
        }
    }
}
