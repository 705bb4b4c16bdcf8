//! Command-line front end: eigenvalue tables, counting, Weyl fits, the
//! verification suite and field residual reports.

pub mod config;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Parser, Subcommand};
use maxwell_ball::fields::ModeField;
use maxwell_ball::scalar::{parse_rational, ratio_to_f64};
use maxwell_ball::spectrum::{counting, spectrum_table, weyl_residual, CountingReport};
use maxwell_ball::{BigInt, BigRational, EigMode, GammaParam, SpectrumError, SpectrumTable};
use num_rational::Ratio;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

pub use config::{GlobalArgs, OutputFormat, RunConfig};
pub use verify::{run_verify, Fault, VerifyOptions, VerifyReport};

/// Largest order `count` and `weyl` will extend a table to on their own.
pub const DEFAULT_N_CAP: usize = 4000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("{0}")]
    RangeNotCertified(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::BadInput(_) | CliError::Io(_) => 2,
            CliError::Certification(_) => 3,
            CliError::RangeNotCertified(_) => 4,
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Certification { .. } | SpectrumError::NotMonotone { .. } => {
                CliError::Certification(e.to_string())
            }
            SpectrumError::IncompleteTable { .. } => CliError::RangeNotCertified(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "maxwell-ball", version, about = "Certified negative eigenvalues of the dissipative Maxwell problem outside the unit ball")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of certified eigenvalue enclosures for n = 1..=n_max.
    Eigs,
    /// Counting function N(r) with multiplicities, and the Weyl prediction.
    Count {
        /// Radius, decimal or p/q.
        #[arg(long = "r")]
        r: String,
        /// Largest order the table may be extended to.
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: usize,
    },
    /// N(r) against (γ₀² - 1) r² on a radius grid, with a least-squares fit.
    Weyl {
        /// Smallest radius; defaults to r_max / 9.
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: usize,
    },
    /// Run every consistency check and emit a JSON report; exit 1 on failure.
    Verify {
        /// Largest order that also gets a Sturm count (default n_max).
        #[arg(long)]
        sturm_n_max: Option<usize>,
        /// Corrupt the table before checking; used to test the checks.
        #[arg(long, hide = true)]
        tamper_multiplicity: bool,
    },
    /// Boundary and curl residuals of the eigenfield of order (n, m).
    Field {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
    },
}

/// `q` rounded to `digits` decimals: `-1` floor, `0` nearest, `1` ceiling.
pub fn decimal_string(q: &BigRational, digits: usize, direction: i8) -> String {
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let scaled = q.clone() * scale;
    let int = match direction {
        d if d < 0 => scaled.floor(),
        d if d > 0 => scaled.ceil(),
        _ => scaled.round(),
    }
    .to_integer();
    let neg = int.is_negative();
    let mut s = int.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = "0".repeat(digits + 1 - s.len()) + &s;
        }
        s.insert(s.len() - digits, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

fn ratio_string(q: &Ratio<BigInt>) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, Serialize)]
struct EigRow {
    n: usize,
    multiplicity: usize,
    lambda_lo: String,
    lambda_hi: String,
    lambda_mid: String,
    z_n: f64,
    gap: f64,
    branch: String,
}

#[derive(Debug, Clone, Serialize)]
struct EigJsonRow {
    #[serde(flatten)]
    row: EigRow,
    lambda_lo_exact: String,
    lambda_hi_exact: String,
}

#[derive(Debug, Serialize)]
struct EigsJson<'a> {
    gamma: &'a str,
    n_max: usize,
    precision: &'a str,
    digits: usize,
    modes: Vec<EigJsonRow>,
}

fn eig_row(mode: &EigMode, digits: usize) -> EigRow {
    EigRow {
        n: mode.n,
        multiplicity: mode.multiplicity,
        lambda_lo: decimal_string(&mode.lambda_lo, digits, -1),
        lambda_hi: decimal_string(&mode.lambda_hi, digits, 1),
        lambda_mid: decimal_string(&mode.lambda_mid(), digits, 0),
        z_n: mode.z_n,
        gap: mode.gap(),
        branch: mode.branch.to_string(),
    }
}

fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_eigs(table: &SpectrumTable, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let digits = cfg.decimal_digits();
    match cfg.output_format {
        OutputFormat::Csv => {
            let rows: Vec<EigRow> = table.modes.iter().map(|m| eig_row(m, digits)).collect();
            write_csv(out, &rows)
        }
        OutputFormat::Json => {
            let modes = table
                .modes
                .iter()
                .map(|m| EigJsonRow {
                    row: eig_row(m, digits),
                    lambda_lo_exact: ratio_string(&m.lambda_lo),
                    lambda_hi_exact: ratio_string(&m.lambda_hi),
                })
                .collect();
            write_json(
                out,
                &EigsJson {
                    gamma: &cfg.gamma,
                    n_max: cfg.n_max,
                    precision: &cfg.precision,
                    digits,
                    modes,
                },
            )
        }
    }
}

/// Order whose eigenvalue should lie beyond radius `r`, with a margin.
fn order_for_radius(gp: &GammaParam, r: f64) -> usize {
    (r * gp.weyl_coefficient().sqrt() + 8.0).ceil() as usize
}

/// Extends `table` until it certifies radius `r` or reaches `cap`.
pub fn ensure_radius(table: &mut SpectrumTable, r: f64, cap: usize) -> Result<(), CliError> {
    while table.certified_radius() <= r {
        if table.n_max >= cap {
            return Err(CliError::RangeNotCertified(format!(
                "radius {r} needs more than n_max = {cap} (table reaches {:.6})",
                table.certified_radius()
            )));
        }
        let target = order_for_radius(&table.gamma_param, r)
            .max(table.n_max + table.n_max / 2 + 1)
            .min(cap);
        table.extend_to(target)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CountRow {
    r: String,
    #[serde(rename = "N")]
    n: u64,
    prediction: f64,
}

#[derive(Debug, Serialize)]
struct WeylRow {
    r: f64,
    #[serde(rename = "N")]
    n: u64,
    prediction: f64,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct WeylJson {
    gamma: String,
    n_max: usize,
    rows: Vec<WeylRow>,
    fitted_leading: f64,
    predicted_leading: f64,
    max_abs_residual_over_r: f64,
    lower_half_max: f64,
    upper_half_max: f64,
}

fn weyl_rows(rep: &CountingReport, lead: f64) -> Vec<WeylRow> {
    rep.r_grid
        .iter()
        .zip(&rep.n_values)
        .zip(&rep.residuals)
        .map(|((&r, &n), &res)| WeylRow {
            r,
            n,
            prediction: lead * r * r,
            residual: res,
        })
        .collect()
}

/// Report of the `field` subcommand.
#[derive(Debug, Serialize)]
struct FieldReport {
    gamma: String,
    branch: String,
    fd_step: f64,
    #[serde(flatten)]
    residuals: verify::FieldResiduals,
}

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one subcommand, writing to the configured output.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = open_output(cfg)?;
    execute_to(command, cfg, &mut *out)?;
    out.flush()?;
    Ok(())
}

/// Runs one subcommand, writing to `out`.
pub fn execute_to(command: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let gp = cfg.gamma_param()?;
    let eps = cfg.precision_value()?;
    match command {
        Command::Eigs => {
            let table = spectrum_table(&gp, cfg.n_max, &eps)?;
            write_eigs(&table, cfg, out)
        }
        Command::Count { r, n_cap } => {
            let radius = parse_rational(r).map_err(|e| CliError::BadInput(e.to_string()))?;
            if !radius.is_positive() {
                return Err(CliError::BadInput(format!("r must be positive, got {r}")));
            }
            let rf = ratio_to_f64(&radius);
            let mut table = spectrum_table(&gp, cfg.n_max, &eps)?;
            ensure_radius(&mut table, rf, *n_cap)?;
            let n = counting(&table, &radius)?;
            let row = CountRow {
                r: r.clone(),
                n,
                prediction: gp.weyl_coefficient() * rf * rf,
            };
            match cfg.output_format {
                OutputFormat::Csv => write_csv(out, &[row]),
                OutputFormat::Json => write_json(out, &row),
            }
        }
        Command::Weyl { r_min, points, n_cap } => {
            let r_max = cfg
                .r_max
                .ok_or_else(|| CliError::BadInput("weyl needs --r-max".into()))?;
            let lo = r_min.unwrap_or(r_max / 9.0);
            if !(lo > 0.0 && lo <= r_max) || *points == 0 {
                return Err(CliError::BadInput(format!("bad grid [{lo}, {r_max}] with {points} points")));
            }
            let mut table = spectrum_table(&gp, cfg.n_max, &eps)?;
            ensure_radius(&mut table, r_max, *n_cap)?;
            let grid = maxwell_ball::spectrum::uniform_grid(lo, r_max, *points);
            let rep = weyl_residual(&table, &grid)?;
            let lead = gp.weyl_coefficient();
            let rows = weyl_rows(&rep, lead);
            let s = &rep.summary;
            match cfg.output_format {
                OutputFormat::Csv => {
                    write_csv(out, &rows)?;
                    eprintln!(
                        "fitted_leading={:.6} predicted_leading={:.6} max_abs_residual_over_r={:.6}",
                        s.fitted_leading, s.predicted_leading, s.max_rel_residual
                    );
                    Ok(())
                }
                OutputFormat::Json => write_json(
                    out,
                    &WeylJson {
                        gamma: cfg.gamma.clone(),
                        n_max: table.n_max,
                        rows,
                        fitted_leading: s.fitted_leading,
                        predicted_leading: s.predicted_leading,
                        max_abs_residual_over_r: s.max_rel_residual,
                        lower_half_max: s.lower_half_max,
                        upper_half_max: s.upper_half_max,
                    },
                ),
            }
        }
        Command::Verify {
            sturm_n_max,
            tamper_multiplicity,
        } => {
            let opts = VerifyOptions {
                sturm_n_max: sturm_n_max.unwrap_or(cfg.n_max),
                fault: tamper_multiplicity.then_some(Fault::Multiplicity2n),
            };
            let report = run_verify(cfg, &opts)?;
            write_json(out, &report)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed(report.failed.join(", ")))
            }
        }
        Command::Field { n, m, fd_step } => {
            if fd_step.is_nan() || *fd_step <= 0.0 {
                return Err(CliError::BadInput(format!("fd_step must be positive, got {fd_step}")));
            }
            if *n == 0 || m.unsigned_abs() as usize > *n {
                return Err(CliError::BadInput(format!("need 1 <= n and |m| <= n, got n = {n}, m = {m}")));
            }
            let mode = maxwell_ball::spectrum::eigenvalue(*n, &gp, &eps)?;
            let field = ModeField::from_mode(&mode, *m, &gp).map_err(|e| CliError::BadInput(e.to_string()))?;
            let report = FieldReport {
                gamma: cfg.gamma.clone(),
                branch: field.branch.to_string(),
                fd_step: *fd_step,
                residuals: verify::field_residuals(&field, *fd_step)?,
            };
            match cfg.output_format {
                OutputFormat::Csv => write_csv(out, &[report]),
                OutputFormat::Json => write_json(out, &report),
            }
        }
    }
}

/// Resolves the configuration, sizes the worker pool and runs the subcommand.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::BadInput(format!("cannot start {} threads: {e}", cfg.threads)))?;
    pool.install(|| execute(&cli.command, &cfg))
}
