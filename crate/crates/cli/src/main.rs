use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

mod commands;

/// Continuous frames: construct, certify, reconstruct, transform.
#[derive(Parser, Debug)]
#[command(name = "contframe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    tolerances: TolFlags,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct TolFlags {
    /// Frame tolerance relative to the upper bound.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_frame: f64,
    /// Allowed deviation of A and B from 1 for a Parseval verdict.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_parseval: f64,
    /// Relative reconstruction tolerance [default: 1e-8, or 1e-12 for the suite].
    #[arg(long, global = true)]
    tol_recon: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a frame from a JSON construction spec.
    Construct {
        #[arg(long)]
        spec: PathBuf,
        /// Write the frame JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify frame bounds.
    Bounds {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, value_enum)]
        expect: Option<Expectation>,
    },
    /// Dual-frame reconstruction of a vector.
    Reconstruct {
        #[arg(long)]
        frame: PathBuf,
        /// CSV signal for sampled spaces, JSON array of entries otherwise.
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continuous wavelet transform on a log-spaced scale grid.
    Cwt {
        /// mexican_hat, morlet, or a CSV file sampled on the signal grid.
        #[arg(long, default_value = "mexican_hat")]
        wavelet: String,
        #[arg(long)]
        amin: f64,
        #[arg(long)]
        amax: f64,
        #[arg(long, default_value_t = 16)]
        voices: usize,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Include negative scales.
        #[arg(long)]
        mirror: bool,
        /// Shift step in signal samples.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Centre frequency of the Morlet wavelet.
        #[arg(long, default_value_t = 6.0)]
        omega0: f64,
    },
    /// Short-time Fourier transform on a uniform time-frequency lattice.
    Stft {
        /// gauss, or a CSV file sampled on the signal grid.
        #[arg(long, default_value = "gauss")]
        window: String,
        #[arg(long, allow_hyphen_values = true)]
        ymin: f64,
        #[arg(long, allow_hyphen_values = true)]
        ymax: f64,
        #[arg(long)]
        dy: f64,
        #[arg(long, allow_hyphen_values = true)]
        gmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        gmax: f64,
        #[arg(long)]
        dg: f64,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a construction or run the self-check suite.
    Verify {
        #[arg(long, value_enum, conflicts_with = "suite", required_unless_present = "suite")]
        construct: Option<VerifyConstruct>,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        #[arg(long, value_enum)]
        suite: Option<Scale>,
        /// Seed for random weights and suite inputs.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Expectation {
    Frame,
    Bessel,
    Parseval,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum VerifyConstruct {
    Parseval,
    BesselOnly,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Scale {
    Small,
    Full,
}

/// Bad input: unreadable files, invalid parameters, failed preconditions.
struct InputError(String);

impl From<contframe::Error> for InputError {
    fn from(e: contframe::Error) -> Self {
        InputError(e.to_string())
    }
}

/// A command's certified numbers plus, if a check failed, the reason.
struct Outcome {
    result: Value,
    violation: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, violation: None }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct { .. } => "construct",
        Command::Bounds { .. } => "bounds",
        Command::Reconstruct { .. } => "reconstruct",
        Command::Cwt { .. } => "cwt",
        Command::Stft { .. } => "stft",
        Command::Verify { .. } => "verify",
    }
}

fn configure_threads() -> Result<(), InputError> {
    let Ok(raw) = std::env::var("CONTFRAME_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| InputError(format!("CONTFRAME_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| InputError(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let tol = commands::Tolerances::resolve(&cli.tolerances, &cli.command);

    let outcome = configure_threads().and_then(|()| commands::run(&cli.command, &tol));
    let (status, code, message, result) = match outcome {
        Ok(Outcome { result, violation: None }) => ("ok", 0u8, None, result),
        Ok(Outcome { result, violation: Some(msg) }) => ("verification_failed", 2, Some(msg), result),
        Err(InputError(msg)) => ("input_error", 1, Some(msg), Value::Null),
    };
    let mut report = json!({
        "tool": "contframe",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "status": status,
        "tolerances": tol,
        "result": result,
    });
    if let Some(msg) = &message {
        report["message"] = Value::String(msg.clone());
        eprintln!("contframe {name}: {msg}");
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    print!("{text}");
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("contframe: cannot write report {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
