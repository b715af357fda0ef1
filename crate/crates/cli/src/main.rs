//! Command-line front end for the X^T A X = B solver.
//!
//! Exit codes: 0 success / consistent, 1 inconsistent (or a failed verify),
//! 2 unknown, 3 input error.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use xtax_core::cfc_model::{format_spec, parse_spec, BlockCensus, CfcSpec};
use xtax_core::planner::{
    decide, max_skew_rank, solve_general, verify_spec, Certificate, MaxSkewRank, Verdict,
    VerdictKind,
};
use xtax_core::skew_canon::skew_canonicalize;
use xtax_core::{is_skew, DenseMatrix};

#[derive(Parser)]
#[command(
    name = "xtax",
    version,
    about = "Decide and solve X^T A X = B for skew-symmetric B, exactly",
    long_about = "A is given by its canonical form for congruence as a spec string \
                  (terms joined by '+': J<size>, G<size>, H<size>(mu), optional '*count'; \
                  e.g. \"J3 + G4*2 + H6(2)\"). B is H_2(-1)^m via --m / --rank-b, or an \
                  exact matrix JSON file. All arithmetic is exact over the Gaussian \
                  rationals; answers carry machine-checkable certificates."
)]
struct Cli {
    /// Emit a stable JSON envelope instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariant rho(A) as a reduced fraction of quarters.
    Rho { spec: String },
    /// Print the block census, rho, and rank(A + A^T) both by the closed
    /// form and by exact elimination.
    Census { spec: String },
    /// Decide whether X^T A X = H_2(-1)^m is consistent.
    Decide {
        spec: String,
        /// Number of H_2(-1) summands in the right-hand side.
        #[arg(long, conflicts_with = "rank_b")]
        m: Option<usize>,
        /// Rank of the skew right-hand side; must be even (rank B = 2m).
        #[arg(long = "rank-b")]
        rank_b: Option<usize>,
    },
    /// Solve X^T A X = H_2(-1)^m and print the certificate chain.
    Solve {
        spec: String,
        #[arg(long)]
        m: usize,
        /// Write the solution matrix JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the certificate JSON to this file.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Solve X^T A X = B for an explicit skew-symmetric B (matrix JSON file).
    #[command(name = "solve-b")]
    SolveB {
        spec: String,
        /// Path to the matrix JSON for B.
        #[arg(long)]
        b: PathBuf,
        /// Write the solution matrix JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check transpose(X) * A * X = B exactly for given X and B files.
    Verify {
        spec: String,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Print the largest rank of a skew-symmetric X^T A X, when known.
    #[command(name = "max-rank")]
    MaxRank { spec: String },
}

struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<xtax_core::cfc_model::SpecError> for CliError {
    fn from(e: xtax_core::cfc_model::SpecError) -> Self {
        CliError(format!("bad spec: {e}"))
    }
}

impl From<xtax_core::PlanError> for CliError {
    fn from(e: xtax_core::PlanError) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 3); 2 is reserved for Unknown.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Rho { spec } => cmd_rho(spec, cli.json),
        Command::Census { spec } => cmd_census(spec, cli.json),
        Command::Decide { spec, m, rank_b } => {
            let m = resolve_m(*m, *rank_b)?;
            cmd_decide(spec, m, cli.json)
        }
        Command::Solve { spec, m, out, cert } => {
            cmd_solve(spec, *m, out.as_deref(), cert.as_deref(), cli.json)
        }
        Command::SolveB { spec, b, out } => cmd_solve_b(spec, b, out.as_deref(), cli.json),
        Command::Verify { spec, x, b } => cmd_verify(spec, x, b, cli.json),
        Command::MaxRank { spec } => cmd_max_rank(spec, cli.json),
    }
}

fn resolve_m(m: Option<usize>, rank_b: Option<usize>) -> Result<usize, CliError> {
    match (m, rank_b) {
        (Some(m), None) => Ok(m),
        (None, Some(r)) => {
            if r % 2 != 0 {
                Err(CliError(format!(
                    "--rank-b {r} is odd, but the rank of a skew-symmetric matrix is always even (Remark 2.3)"
                )))
            } else {
                Ok(r / 2)
            }
        }
        (None, None) => Err(CliError("one of --m or --rank-b is required".into())),
        (Some(_), Some(_)) => Err(CliError("--m and --rank-b are mutually exclusive".into())),
    }
}

fn parse(spec: &str) -> Result<CfcSpec, CliError> {
    Ok(parse_spec(spec)?)
}

fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    DenseMatrix::from_json(&text)
        .map_err(|e| CliError(format!("bad matrix JSON in {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))
}

fn spec_label(s: &CfcSpec) -> String {
    if s.is_empty() {
        "(empty)".to_string()
    } else {
        s.to_string()
    }
}

fn print_certificate(cert: &Certificate) {
    for step in cert.steps() {
        println!(
            "{} ~> {}  [{}; {}]",
            spec_label(step.lhs()),
            spec_label(step.rhs()),
            step.law(),
            step.paper_ref()
        );
    }
}

fn verdict_exit(kind: VerdictKind) -> u8 {
    match kind {
        VerdictKind::Consistent => 0,
        VerdictKind::Inconsistent => 1,
        VerdictKind::Unknown => 2,
    }
}

// --- rho -------------------------------------------------------------------

#[derive(Serialize)]
struct RhoOut {
    command: &'static str,
    spec: String,
    rho: String,
    quarters: u64,
}

fn cmd_rho(spec_str: &str, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let rho = spec.rho();
    if json {
        let out = RhoOut {
            command: "rho",
            spec: format_spec(&spec),
            rho: rho.to_string(),
            quarters: rho.quarters,
        };
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("{rho}");
    }
    Ok(0)
}

// --- census ----------------------------------------------------------------

#[derive(Serialize)]
struct CensusOut {
    command: &'static str,
    spec: String,
    census: BlockCensus,
    rho: String,
    rank_a_plus_at_formula: usize,
    rank_a_plus_at_computed: usize,
}

fn cmd_census(spec_str: &str, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let census = spec.census();
    let a = spec.materialize();
    let computed = a.add(&a.transpose()).map_err(xtax_core::PlanError::from)?.rank();
    let formula = spec.rank_a_plus_at_formula();
    if json {
        let out = CensusOut {
            command: "census",
            spec: format_spec(&spec),
            census,
            rho: spec.rho().to_string(),
            rank_a_plus_at_formula: formula,
            rank_a_plus_at_computed: computed,
        };
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("spec: {}", spec_label(&spec));
        println!("n = {}", census.n);
        println!("j1 = {}  j_odd = {}  j_even = {}", census.j1, census.j_odd, census.j_even);
        println!("gamma_even = {}  gamma_odd = {}", census.gamma_even, census.gamma_odd);
        println!(
            "h_generic = {}  h_plus_even = {}  h_minus_odd = {}",
            census.h_generic, census.h_plus_even, census.h_minus_odd
        );
        println!("rho = {}", spec.rho());
        println!("rank(A+A^T): formula = {formula}, computed = {computed}");
    }
    Ok(0)
}

// --- decide ----------------------------------------------------------------

#[derive(Serialize)]
struct DecideOut {
    command: &'static str,
    spec: String,
    m: usize,
    verdict: &'static str,
    reason: &'static str,
    rho: String,
    floor_rho: u64,
}

fn decide_out(command: &'static str, spec: &CfcSpec, v: &Verdict) -> DecideOut {
    DecideOut {
        command,
        spec: format_spec(spec),
        m: v.m,
        verdict: v.kind.as_str(),
        reason: v.reason.label(),
        rho: v.rho.to_string(),
        floor_rho: v.rho.floor(),
    }
}

fn print_verdict(v: &Verdict) {
    println!("verdict: {}", v.kind.as_str());
    println!("reason: {}", v.reason.label());
    println!("rho = {} (floor {}), m = {}", v.rho, v.rho.floor(), v.m);
}

fn cmd_decide(spec_str: &str, m: usize, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let verdict = decide(&spec, m);
    if json {
        println!("{}", serde_json::to_string(&decide_out("decide", &spec, &verdict)).unwrap());
    } else {
        print_verdict(&verdict);
    }
    Ok(verdict_exit(verdict.kind))
}

// --- solve -----------------------------------------------------------------

#[derive(Serialize)]
struct SolveOut {
    command: &'static str,
    spec: String,
    m: usize,
    verdict: &'static str,
    reason: &'static str,
    solution: DenseMatrix,
    certificate: Certificate,
}

fn cmd_solve(
    spec_str: &str,
    m: usize,
    out: Option<&Path>,
    cert_path: Option<&Path>,
    json: bool,
) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let verdict = decide(&spec, m);
    if verdict.kind != VerdictKind::Consistent {
        if json {
            println!("{}", serde_json::to_string(&decide_out("solve", &spec, &verdict)).unwrap());
        } else {
            print_verdict(&verdict);
        }
        return Ok(verdict_exit(verdict.kind));
    }
    let cert = verdict.certificate.clone().expect("consistent verdict has a certificate");
    let x = cert.composed_witness()?;
    if let Some(path) = out {
        write_json(path, &x)?;
    }
    if let Some(path) = cert_path {
        write_json(path, &cert)?;
    }
    if json {
        let payload = SolveOut {
            command: "solve",
            spec: format_spec(&spec),
            m,
            verdict: verdict.kind.as_str(),
            reason: verdict.reason.label(),
            solution: x,
            certificate: cert,
        };
        println!("{}", serde_json::to_string(&payload).unwrap());
    } else {
        print_verdict(&verdict);
        println!("certificate:");
        print_certificate(&cert);
        println!("solution X ({}x{}):", x.rows(), x.cols());
        print!("{x}");
    }
    Ok(0)
}

// --- solve-b ---------------------------------------------------------------

#[derive(Serialize)]
struct SolveBOut {
    command: &'static str,
    spec: String,
    rank_b: usize,
    verdict: &'static str,
    reason: &'static str,
    solution: DenseMatrix,
}

fn cmd_solve_b(spec_str: &str, b_path: &Path, out: Option<&Path>, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let b = read_matrix(b_path)?;
    if !is_skew(&b).map_err(|e| CliError(e.to_string()))? {
        return Err(CliError("B is not skew-symmetric".into()));
    }
    let m = skew_canonicalize(&b).map_err(|e| CliError(e.to_string()))?.m;
    let verdict = decide(&spec, m);
    if verdict.kind != VerdictKind::Consistent {
        if json {
            println!("{}", serde_json::to_string(&decide_out("solve-b", &spec, &verdict)).unwrap());
        } else {
            print_verdict(&verdict);
        }
        return Ok(verdict_exit(verdict.kind));
    }
    let x = solve_general(&spec, &b)?;
    if let Some(path) = out {
        write_json(path, &x)?;
    }
    if json {
        let payload = SolveBOut {
            command: "solve-b",
            spec: format_spec(&spec),
            rank_b: 2 * m,
            verdict: verdict.kind.as_str(),
            reason: verdict.reason.label(),
            solution: x,
        };
        println!("{}", serde_json::to_string(&payload).unwrap());
    } else {
        println!("rank(B) = {}", 2 * m);
        println!("solution X ({}x{}):", x.rows(), x.cols());
        print!("{x}");
    }
    Ok(0)
}

// --- verify ----------------------------------------------------------------

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    spec: String,
    holds: bool,
}

fn cmd_verify(spec_str: &str, x_path: &Path, b_path: &Path, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let x = read_matrix(x_path)?;
    let b = read_matrix(b_path)?;
    let holds = verify_spec(&spec, &x, &b)?;
    if json {
        let out = VerifyOut { command: "verify", spec: format_spec(&spec), holds };
        println!("{}", serde_json::to_string(&out).unwrap());
    } else {
        println!("verified: {holds}");
    }
    Ok(if holds { 0 } else { 1 })
}

// --- max-rank --------------------------------------------------------------

#[derive(Serialize)]
struct MaxRankOut {
    command: &'static str,
    spec: String,
    known: bool,
    value: Option<u64>,
    upper_bound: u64,
}

fn cmd_max_rank(spec_str: &str, json: bool) -> Result<u8, CliError> {
    let spec = parse(spec_str)?;
    let answer = max_skew_rank(&spec);
    let (known, value, bound, code) = match answer {
        MaxSkewRank::Known(v) => (true, Some(v), v, 0),
        MaxSkewRank::Unknown { upper_bound } => (false, None, upper_bound, 2),
    };
    if json {
        let out = MaxRankOut {
            command: "max-rank",
            spec: format_spec(&spec),
            known,
            value,
            upper_bound: bound,
        };
        println!("{}", serde_json::to_string(&out).unwrap());
    } else if known {
        println!("{bound}");
    } else {
        println!("unknown (upper bound {bound})");
    }
    Ok(code)
}
