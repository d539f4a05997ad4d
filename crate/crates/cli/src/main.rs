//! `cqubit` — command-line front end for the conformal-qubit library.
//!
//! Subcommands: `evaluate` (correlations and K3 of one protocol),
//! `classify` (map class, ratio constraint and bound prediction),
//! `macroreal` (NSIT/AoT condition table), `sweep` (optimal-K3 surfaces or
//! family searches) and `witness` (search for bound violations). Inputs and
//! outputs are JSON (`-` for stdin/stdout); sweeps can emit their grid as
//! CSV. Identical inputs and seeds produce identical bytes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use conformal_qubit::{
    luders_violation_search, macrorealism_report, optimal_k3_surface, CorrelationFactors,
    ExtendedComplex, FlcMap, MacrorealismReport, MapClass, Protocol, SweepConfig, SweepFamily,
    SweepResult, TimePair, TripleJoint,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

use conformal_qubit::macrorealism::triple_joint;

const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cqubit",
    about = "Qubit dynamics from fractional linear conformal maps: Leggett-Garg correlations, macrorealism conditions and parameter sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlations, K3, correlation factors and ratio-constraint flags of a
    /// protocol
    Evaluate(IoArgs),
    /// Class of a single map (linear action, scale, ratio constraint, bound
    /// prediction)
    Classify(IoArgs),
    /// Full NSIT/AoT condition table and the three-time joint distribution
    Macroreal(IoArgs),
    /// Optimal-K3 surface of a family (or the violation search for the
    /// general family)
    Sweep(SweepArgs),
    /// Search for protocols violating the 3/2 bound
    Witness(WitnessArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input path, or `-` for stdin
    #[arg(long, default_value = "-")]
    input: String,
    /// Output path, or `-` for stdout
    #[arg(long, default_value = "-")]
    output: String,
    /// Tolerance for constraint flags and condition satisfaction
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    /// Map family: a, b, unitary, constrained or general
    #[arg(long)]
    family: String,
    /// Output path, or `-` for stdout
    #[arg(long, default_value = "-")]
    output: String,
    /// json = summary with maximum and argmax; csv = the emitted grid
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Points per surface axis (family default when omitted)
    #[arg(long)]
    grid: Option<usize>,
    /// Points per swept phase angle (family default when omitted)
    #[arg(long)]
    phase_grid: Option<usize>,
    /// Upper bound of the modulus axes
    #[arg(long)]
    modulus_max: Option<f64>,
    /// Golden-section iterations per coordinate for local refinement
    #[arg(long)]
    refine: Option<usize>,
    /// Random candidates for sampled stages
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct WitnessArgs {
    /// Family to search (general finds violations; the constrained families
    /// double as bound checks)
    #[arg(long, default_value = "general")]
    family: String,
    /// Output path, or `-` for stdout
    #[arg(long, default_value = "-")]
    output: String,
    /// json = summary with witness; csv = refined candidate list
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Random candidates to draw
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    /// Golden-section iterations per coordinate for local refinement
    #[arg(long, default_value_t = 40)]
    refine: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evaluate(args) => evaluate(&args),
        Command::Classify(args) => classify(&args),
        Command::Macroreal(args) => macroreal(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Witness(args) => witness(&args),
    }
}

// ---------------------------------------------------------------------------
// input parsing
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawMapInput {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

#[derive(Deserialize)]
struct ProtocolInput {
    z1: ExtendedComplex,
    f12: RawMapInput,
    f23: RawMapInput,
}

fn build_map(raw: &RawMapInput, name: &str) -> Result<FlcMap, CliError> {
    let c = |p: [f64; 2]| num_complex::Complex64::new(p[0], p[1]);
    FlcMap::new(c(raw.a), c(raw.b), c(raw.c), c(raw.d))
        .map_err(|e| CliError::Validation(format!("invalid map {name}: {e}")))
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(Path::new(path))
            .map_err(|e| CliError::Io(format!("reading {path}: {e}")))
    }
}

fn write_output(path: &str, contents: &str) -> Result<(), CliError> {
    if path == "-" {
        std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}")))
    } else {
        fs::write(Path::new(path), contents).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
    }
}

fn parse_protocol(text: &str) -> Result<Protocol, CliError> {
    let raw: ProtocolInput = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("invalid protocol JSON: {e}")))?;
    let f12 = build_map(&raw.f12, "f12")?;
    let f23 = build_map(&raw.f23, "f23")?;
    Ok(Protocol::new(raw.z1, f12, f23))
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(format!("serializing output: {e}")))
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FactorTable {
    #[serde(rename = "12")]
    pair12: CorrelationFactors,
    #[serde(rename = "23")]
    pair23: CorrelationFactors,
    #[serde(rename = "13")]
    pair13: CorrelationFactors,
}

#[derive(Serialize)]
struct RatioFlags {
    f12: bool,
    f23: bool,
    f13: bool,
}

#[derive(Serialize)]
struct EvaluateOutput {
    #[serde(rename = "C12")]
    c12: f64,
    #[serde(rename = "C23")]
    c23: f64,
    #[serde(rename = "C13")]
    c13: f64,
    #[serde(rename = "K3")]
    k3: f64,
    factors: FactorTable,
    ratio_constraint: RatioFlags,
}

fn evaluate(args: &IoArgs) -> Result<(), CliError> {
    let p = parse_protocol(&read_input(&args.input)?)?;
    let r = p.k3();
    let out = EvaluateOutput {
        c12: r.c12,
        c23: r.c23,
        c13: r.c13,
        k3: r.k3,
        factors: FactorTable {
            pair12: p.factors(TimePair::T12),
            pair23: p.factors(TimePair::T23),
            pair13: p.factors(TimePair::T13),
        },
        ratio_constraint: RatioFlags {
            f12: p.f12().satisfies_ratio_constraint(args.tol),
            f23: p.f23().satisfies_ratio_constraint(args.tol),
            f13: p.f13().satisfies_ratio_constraint(args.tol),
        },
    };
    write_output(&args.output, &to_pretty_json(&out)?)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClassifyOutput {
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    ratio_constraint: bool,
    predicted_luders: &'static str,
}

fn classify(args: &IoArgs) -> Result<(), CliError> {
    let raw: RawMapInput = serde_json::from_str(&read_input(&args.input)?)
        .map_err(|e| CliError::Validation(format!("invalid map JSON: {e}")))?;
    let map = build_map(&raw, "input")?;
    let constrained = map.satisfies_ratio_constraint(args.tol);
    let (class, r) = match map.classify() {
        MapClass::Unitary => ("unitary", None),
        MapClass::UnitaryScaled { r } => ("unitary_scaled", Some(r)),
        MapClass::NonLinear => ("non_linear", None),
    };
    let out = ClassifyOutput {
        class,
        r,
        ratio_constraint: constrained,
        predicted_luders: if constrained {
            "respected"
        } else {
            "may violate"
        },
    };
    write_output(&args.output, &to_pretty_json(&out)?)
}

// ---------------------------------------------------------------------------
// macroreal
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MacrorealOutput {
    #[serde(flatten)]
    report: MacrorealismReport,
    triple_joint: TripleJoint,
}

fn macroreal(args: &IoArgs) -> Result<(), CliError> {
    let p = parse_protocol(&read_input(&args.input)?)?;
    let out = MacrorealOutput {
        report: macrorealism_report(&p, args.tol),
        triple_joint: triple_joint(&p),
    };
    write_output(&args.output, &to_pretty_json(&out)?)
}

// ---------------------------------------------------------------------------
// sweep / witness
// ---------------------------------------------------------------------------

fn parse_family(text: &str) -> Result<SweepFamily, CliError> {
    text.parse::<SweepFamily>().map_err(CliError::Validation)
}

fn emit_sweep(result: &SweepResult, format: Format, output: &str) -> Result<(), CliError> {
    match format {
        Format::Json => write_output(output, &to_pretty_json(result)?),
        Format::Csv => {
            let mut buf = Vec::new();
            result
                .write_csv(&mut buf)
                .map_err(|e| CliError::Io(format!("formatting CSV: {e}")))?;
            let text =
                String::from_utf8(buf).map_err(|e| CliError::Io(format!("formatting CSV: {e}")))?;
            write_output(output, &text)
        }
    }
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let mut cfg = SweepConfig::for_family(family);
    cfg.seed = args.seed;
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    if let Some(phase_grid) = args.phase_grid {
        cfg.phase_grid = phase_grid;
    }
    if let Some(modulus_max) = args.modulus_max {
        cfg.modulus_max = modulus_max;
    }
    if let Some(refine) = args.refine {
        cfg.refine_steps = refine;
    }
    if let Some(samples) = args.samples {
        cfg.samples = samples;
    }
    let result = if family == SweepFamily::General {
        luders_violation_search(&cfg)
    } else {
        optimal_k3_surface(&cfg)
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    eprintln!(
        "sweep: family {family}, {} evaluations in {:.2?}",
        result.evaluations, result.wall_time
    );
    emit_sweep(&result, args.format, &args.output)
}

fn witness(args: &WitnessArgs) -> Result<(), CliError> {
    let family = parse_family(&args.family)?;
    let mut cfg = SweepConfig::for_family(family);
    cfg.seed = args.seed;
    cfg.samples = args.samples;
    cfg.refine_steps = args.refine;
    let result =
        luders_violation_search(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    eprintln!(
        "witness: family {family}, best K3 = {}, {} evaluations in {:.2?}",
        result.max_k3, result.evaluations, result.wall_time
    );
    emit_sweep(&result, args.format, &args.output)
}
