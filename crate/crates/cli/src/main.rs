use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use halphen_core::Error;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "halphen-lab", version, about = "Eisenstein series, Darboux-Halphen flows, the Chazy Frobenius manifold and genus-one connections")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Global {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Truncation order of q-series.
    #[arg(long, global = true, default_value_t = 64)]
    pub order: usize,

    /// Tolerance for special-function evaluation and "within tol" checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Include per-check runtimes in verification reports.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump Eisenstein series coefficients.
    Series(SeriesArgs),
    /// Evaluate a special function at a point.
    Eval(EvalArgs),
    /// Integrate one of the dynamical systems along a straight path.
    Integrate(IntegrateArgs),
    /// Frobenius structure at a flat point.
    Frobenius(FrobeniusArgs),
    /// Connection data at a point of the upper half-plane.
    Connections(ConnectionsArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesName {
    E2,
    E4,
    E6,
}

impl SeriesName {
    pub fn weight(self) -> u32 {
        match self {
            SeriesName::E2 => 2,
            SeriesName::E4 => 4,
            SeriesName::E6 => 6,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub name: SeriesName,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalFn {
    Theta,
    Wp,
    Ek,
    Eta1,
    E2,
    E4,
    E6,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum, ignore_case = true)]
    pub function: EvalFn,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub tau: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    /// Theta characteristic as EPS,DELTA.
    #[arg(long = "char", value_parser = parse_char, default_value = "0,0")]
    pub characteristic: (u8, u8),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemName {
    Ramanujan,
    Rescaled,
    Halphen,
    Chazy,
    Lifted,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long, value_enum)]
    pub system: SystemName,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub from: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub to: Complex64,
    /// Initial state as a JSON array of numbers, [re, im] pairs or {"re", "im"} objects.
    #[arg(long)]
    pub init: Option<String>,
    /// Read --from/--to as points in tau and convert to the system's time.
    /// Without --init the modular solution at --from is used.
    #[arg(long)]
    pub tau_path: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub rtol: f64,
    /// Include every accepted sample in the output.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct FrobeniusArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub t1: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub t2: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub t3: Complex64,
}

#[derive(Args, Debug)]
pub struct ConnectionsArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,2")]
    pub tau: Complex64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,2")]
    pub tau: Complex64,
}

/// Parse `RE,IM` or a bare real number.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE,IM, got '{s}'")),
    }
}

fn parse_char(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected EPS,DELTA, got '{s}'"))?;
    let bit = |p: &str| match p.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(format!("characteristic entries are 0 or 1, got '{other}'")),
    };
    Ok((bit(a)?, bit(b)?))
}

/// Outcome of a command: printed output and whether every check held.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

/// Errors caused by the arguments rather than by the computation.
fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NotInUpperHalfPlane(_)
            | Error::InvalidTolerance(_)
            | Error::InvalidCharacteristic(..)
            | Error::OddCharacteristic(..)
            | Error::InvalidThetaIndex(_)
            | Error::UnsupportedWeight(_)
            | Error::UnknownSuite(_)
            | Error::InvalidConfig(_)
            | Error::InvalidPath
            | Error::DimensionMismatch { .. }
            | Error::MalformedSeries(_)
            | Error::NotUnimodular(_)
            | Error::ZeroLambda
            | Error::LatticePoint(_)
            | Error::CoalescingCoordinates(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    if !(g.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Series(a) => commands::series(&g, a),
        Command::Eval(a) => commands::eval(&g, a),
        Command::Integrate(a) => commands::integrate(&g, a),
        Command::Frobenius(a) => commands::frobenius(&g, a),
        Command::Connections(a) => commands::connections(&g, a),
        Command::Verify(a) => commands::verify(&g, a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
        Err(commands::Failure::Reported(out)) => {
            print!("{}", out.text);
            ExitCode::from(1)
        }
    }
}
