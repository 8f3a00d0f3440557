//! `qrs`: construct quantum Reed-Solomon codes, tabulate erasure-channel
//! capacity curves, evaluate one-way repeater chains, optimize repeater
//! parameters, and verify the analytics by Monte Carlo.
//!
//! Exit codes: 0 success, 1 validation error, 2 nothing feasible, 3 internal.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use qrs_core::erasure::{capacity_points_to_csv, default_p_grid};
use qrs_core::monte_carlo::{
    sample_decode_outcomes, sample_erasure_success, TrialConfig, VerificationRecord,
};
use qrs_core::qrsc::{PauliWord, QrscCode, QrscError};
use qrs_core::repeater::PerformanceReport;
use qrs_core::sweep::frontier_to_csv;
use qrs_core::{PrimeField, SweepResult};

use config::{parse, CapacityFile, ChainFile, OptimizeFile, VerifyFile};
use output::{resolve, write_atomic};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qrs",
    version,
    about = "Quantum Reed-Solomon codes for one-way quantum repeaters"
)]
struct Cli {
    /// Worker threads for grid evaluation and sampling (default: all cores).
    /// Outputs are byte-identical regardless of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the [[d, 2k-d, d-k+1]] code: matrices, stabilizers, logicals.
    Code {
        /// Prime qudit dimension (= block length).
        #[arg(long)]
        d: u64,
        /// Classical message length, d/2 < k <= d.
        #[arg(long)]
        k: usize,
    },
    /// Tabulate erasure-channel success curves around the capacity threshold.
    Capacity {
        #[arg(long)]
        config: PathBuf,
        /// Output file (default capacity.csv in $QRS_OUTPUT_DIR or cwd).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate one repeater-chain configuration end to end.
    Chain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exhaustive (d, k, L_0) search minimizing the cost coefficient.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-d frontier as CSV.
        #[arg(long)]
        frontier: Option<PathBuf>,
    },
    /// Monte Carlo verification of the analytic probabilities.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore a second initialization (e.g. in tests within one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Code { d, k } => run_code(d, k),
        Command::Capacity {
            config,
            out,
            format,
        } => run_capacity(&config, out, format),
        Command::Chain {
            config,
            out,
            format,
        } => run_chain(&config, out, format),
        Command::Optimize {
            config,
            out,
            frontier,
        } => run_optimize(&config, out, frontier),
        Command::Verify { config, out, seed } => run_verify(&config, out, seed),
    }
}

/// Same-type stabilizer multiples of a logical operator, not counting the
/// operator itself, deterministically ordered. Skipped for groups too large
/// to enumerate.
fn listed_equivalents(code: &QrscCode, op: &PauliWord) -> Option<Vec<String>> {
    let d = code.field().modulus();
    let subgroup = d.checked_pow((code.block_length() - code.base().message_length()) as u32)?;
    if subgroup > 25 {
        return None;
    }
    let pure_x = op.z_exponents().iter().all(|&e| e == 0);
    let mut words: Vec<PauliWord> = code
        .stabilizer_equivalents(op)
        .ok()?
        .into_iter()
        .filter(|w| {
            if pure_x {
                w.z_exponents().iter().all(|&e| e == 0)
            } else {
                w.x_exponents().iter().all(|&e| e == 0)
            }
        })
        .filter(|w| w != op)
        .collect();
    words.sort();
    words.dedup();
    Some(words.iter().map(|w| w.to_string()).collect())
}

fn run_code(d: u64, k: usize) -> Result<(), CliError> {
    let field = PrimeField::new(d).map_err(|e| CliError::Validation(e.to_string()))?;
    let code = QrscCode::new(field, k).map_err(|e| match e {
        QrscError::CssViolation { .. } => CliError::Validation(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;

    let base = code.base();
    println!(
        "[[{},{},{}]]_{} quantum Reed-Solomon code over GF({}), alpha = {}",
        code.block_length(),
        code.n_logical(),
        code.distance(),
        d,
        d,
        field.alpha()
    );
    println!(
        "classical base: [{},{},{}]_{} with dual [{},{},{}]_{}",
        base.block_length(),
        base.message_length(),
        base.distance(),
        d,
        base.block_length(),
        base.block_length() - base.message_length(),
        base.message_length() + 1,
        d
    );
    println!("G =");
    for row in base.generator().row_vecs() {
        println!("  {}", join_row(&row));
    }
    println!("H =");
    for row in base.parity_check().row_vecs() {
        println!("  {}", join_row(&row));
    }
    println!("stabilizers:");
    for (i, s) in code.x_stabilizers().iter().enumerate() {
        println!("  S_X^({}) = {}", i + 1, s);
    }
    for (i, s) in code.z_stabilizers().iter().enumerate() {
        println!("  S_Z^({}) = {}", i + 1, s);
    }
    println!("logical operators:");
    for (i, op) in code.logical_x().iter().enumerate() {
        print_logical("X", i, op, &code);
    }
    for (i, op) in code.logical_z().iter().enumerate() {
        print_logical("Z", i, op, &code);
    }
    Ok(())
}

fn print_logical(kind: &str, index: usize, op: &PauliWord, code: &QrscCode) {
    match listed_equivalents(code, op) {
        Some(eq) if !eq.is_empty() => println!(
            "  {}_L^({}) = {}  (equivalents: {})",
            kind,
            index + 1,
            op,
            eq.join(", ")
        ),
        _ => println!("  {}_L^({}) = {}", kind, index + 1, op),
    }
}

fn join_row(row: &[u64]) -> String {
    row.iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_capacity(
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let file: CapacityFile = parse(config_path)?;
    let cfg = &file.capacity;
    // The code family exists only at prime d: snap and say so.
    let mut d_list = Vec::with_capacity(cfg.d_list.len());
    for &requested in &cfg.d_list {
        let snapped = qrs_core::nearest_prime(requested);
        if snapped != requested {
            println!("note: d={requested} is not prime; using nearest prime {snapped}");
        }
        if !d_list.contains(&snapped) {
            d_list.push(snapped);
        }
    }
    let grid = default_p_grid(cfg.code_rate, cfg.half_width, cfg.points);
    let points = qrs_core::capacity_gap_curve(cfg.code_rate, &d_list, &grid)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let (default_name, contents) = match format {
        Format::Csv => ("capacity.csv", capacity_points_to_csv(&points)),
        Format::Json => (
            "capacity.json",
            to_pretty_json(&SchemaWrapper {
                schema: "qrs.capacity.v1",
                payload: &points,
            })?,
        ),
    };
    let path = resolve(out, default_name);
    write_atomic(&path, &contents)?;
    println!(
        "capacity: {} rows ({} dimensions x {} grid points) -> {}",
        points.len(),
        d_list.len(),
        grid.len(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SchemaWrapper<'a, T: Serialize> {
    schema: &'a str,
    payload: &'a T,
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run_chain(
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let file: ChainFile = parse(config_path)?;
    let link = file.link.to_link()?;
    let report = qrs_core::evaluate_chain(&file.hardware, &link, file.chain.d, file.chain.k)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let (default_name, contents) = match format {
        Format::Json => (
            "chain.json",
            to_pretty_json(&SchemaWrapper {
                schema: "qrs.chain.v1",
                payload: &report,
            })?,
        ),
        Format::Csv => (
            "chain.csv",
            format!(
                "# schema: qrs.chain.v1\n{}\n{}\n",
                PerformanceReport::csv_header(),
                report.csv_row()
            ),
        ),
    };
    let path = resolve(out, default_name);
    write_atomic(&path, &contents)?;

    println!(
        "chain: d={} k={} L_0={} km, r={} stations -> {}",
        report.d,
        report.k,
        report.l_0_km,
        report.stations,
        path.display()
    );
    println!(
        "  eta={:.6} eps={:.6} p_success={:.6} Q={:.6}",
        report.eta, report.eps_xz, report.p_success, report.q
    );
    match report.c_prime {
        Some(c) => println!(
            "  R = {:.6e} bits/s ({:.6e} per t_0), C' = {:.6e}",
            report.r_key_bits_per_s, report.r_key_bits_per_t0, c
        ),
        None => println!("  infeasible: no secret key in this configuration"),
    }
    if !report.feasible {
        return Err(CliError::Infeasible(
            "chain configuration yields zero key rate".into(),
        ));
    }
    Ok(())
}

fn run_optimize(
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    frontier: Option<PathBuf>,
) -> Result<(), CliError> {
    let file: OptimizeFile = parse(config_path)?;
    let spec = file.to_spec();
    let result = qrs_core::optimize(&spec).map_err(|e| CliError::Validation(e.to_string()))?;

    let path = resolve(out, "optimize.json");
    write_atomic(
        &path,
        &to_pretty_json(&OptimizeOutput {
            schema: "qrs.optimize.v1",
            spec: &spec,
            result: &result,
        })?,
    )?;
    if let Some(frontier_path) = frontier {
        write_atomic(&frontier_path, &frontier_to_csv(&result))?;
    }

    println!(
        "optimize: {} grid points evaluated -> {}",
        result.evaluated_points,
        path.display()
    );
    match &result.best {
        Some(best) => {
            println!(
                "  best: d={} k={} L_0={} km (r={}), C' = {:.6e}, R = {:.6e} bits/s",
                best.d,
                best.k,
                best.l_0_km,
                best.stations,
                best.c_prime.unwrap_or(f64::NAN),
                best.r_key_bits_per_s
            );
            Ok(())
        }
        None => {
            println!("  no feasible configuration on the grid");
            Err(CliError::Infeasible(
                "every grid point is infeasible".into(),
            ))
        }
    }
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    schema: &'a str,
    spec: &'a qrs_core::SweepSpec,
    result: &'a SweepResult,
}

fn run_verify(
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    let file: VerifyFile = parse(config_path)?;
    let cfg = &file.verify;
    let seed = seed_override.unwrap_or(cfg.seed);

    let mut records: Vec<VerificationRecord> = Vec::new();
    for point in &cfg.grid {
        let trial = TrialConfig {
            d: point.d,
            k: point.k,
            p_l: point.p_l,
            eps: point.eps,
            n_samples: cfg.n_samples,
            seed,
        };
        let label = format!("d={} k={} p_l={} eps={}", point.d, point.k, point.p_l, point.eps);

        let erasure = sample_erasure_success(&trial)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if erasure.rank_disagreements > 0 {
            return Err(CliError::Internal(format!(
                "rank cross-check disagreed {} times at {label}",
                erasure.rank_disagreements
            )));
        }
        let analytic_success = qrs_core::p_success(point.d, point.k, point.p_l)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        records.push(VerificationRecord::new(
            format!("p_success[{label}]"),
            analytic_success,
            erasure.estimate(erasure.count_success),
            erasure.std_error(erasure.count_success),
        ));

        if 2 * point.k as u64 > point.d {
            let decode = sample_decode_outcomes(&trial)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let (pc, pi) = qrs_core::p_correct_incorrect(point.d, point.k, 1.0 - point.p_l, point.eps)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            records.push(VerificationRecord::new(
                format!("p_correct[{label}]"),
                pc,
                decode.estimate(decode.count_correct),
                decode.std_error(decode.count_correct),
            ));
            records.push(VerificationRecord::new(
                format!("p_incorrect[{label}]"),
                pi,
                decode.estimate(decode.count_incorrect),
                decode.std_error(decode.count_incorrect),
            ));
        }
    }

    let all_pass = records.iter().all(|r| r.pass);
    let path = resolve(out, "verify.json");
    write_atomic(
        &path,
        &to_pretty_json(&VerifyOutput {
            schema: "qrs.verify.v1",
            seed,
            n_samples: cfg.n_samples,
            all_pass,
            records: &records,
        })?,
    )?;

    for r in &records {
        println!(
            "  {}: analytic={:.6e} estimate={:.6e} sigma={:.2} {}",
            r.quantity,
            r.analytic,
            r.estimate,
            r.sigmas,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "verify: {} checks, {} -> {}",
        records.len(),
        if all_pass { "all within 4 sigma" } else { "DISAGREEMENT" },
        path.display()
    );
    if !all_pass {
        return Err(CliError::Internal(
            "Monte Carlo disagrees with analytic values".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    schema: &'a str,
    seed: u64,
    n_samples: u64,
    all_pass: bool,
    records: &'a [VerificationRecord],
}
