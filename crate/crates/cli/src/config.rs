//! Run configuration: command-line flags over a `key=value` file over defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use maxwell_ball::scalar::parse_rational;
use maxwell_ball::{BigRational, GammaParam};
use num_traits::Signed;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Dissipation parameter, decimal or p/q; must be positive and not 1.
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// Largest order n in the eigenvalue table.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Target width of every eigenvalue enclosure, decimal or p/q.
    #[arg(long, global = true)]
    pub precision: Option<String>,
    /// Largest radius for the Weyl grid.
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// File of key=value lines supplying defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub gamma: String,
    pub n_max: usize,
    pub precision: String,
    pub r_max: Option<f64>,
    pub threads: usize,
    pub output_format: OutputFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma: "2".into(),
            n_max: 50,
            precision: "1e-30".into(),
            r_max: None,
            threads: 0,
            output_format: OutputFormat::Csv,
            output: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadInput(msg.into())
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| bad(format!("config key {key}: {e}")))
}

impl RunConfig {
    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "gamma" => self.gamma = value.to_string(),
                "n_max" => self.n_max = parse_value(&key, value)?,
                "precision" => self.precision = value.to_string(),
                "r_max" => self.r_max = Some(parse_value(&key, value)?),
                "threads" => self.threads = parse_value(&key, value)?,
                "format" | "output_format" => self.output_format = parse_value(&key, value)?,
                "output" => self.output = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown config key {other:?}"))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, args: &GlobalArgs) {
        if let Some(g) = &args.gamma {
            self.gamma = g.clone();
        }
        if let Some(n) = args.n_max {
            self.n_max = n;
        }
        if let Some(p) = &args.precision {
            self.precision = p.clone();
        }
        if args.r_max.is_some() {
            self.r_max = args.r_max;
        }
        if let Some(t) = args.threads {
            self.threads = t;
        }
        if let Some(f) = args.format {
            self.output_format = f;
        }
        if args.output.is_some() {
            self.output = args.output.clone();
        }
    }

    /// Defaults, then the config file if given, then explicit flags.
    pub fn resolve(args: &GlobalArgs) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.apply_file_text(&read_config(path)?)?;
        }
        cfg.apply_flags(args);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.gamma_param()?;
        self.precision_value()?;
        if self.n_max == 0 {
            return Err(bad("n_max must be at least 1"));
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > 0.0) {
                return Err(bad(format!("r_max must be positive, got {r}")));
            }
        }
        Ok(())
    }

    pub fn gamma_param(&self) -> Result<GammaParam, CliError> {
        GammaParam::parse(&self.gamma).map_err(|e| bad(e.to_string()))
    }

    pub fn precision_value(&self) -> Result<BigRational, CliError> {
        let p = parse_rational(&self.precision).map_err(|e| bad(e.to_string()))?;
        if !p.is_positive() {
            return Err(bad(format!("precision must be positive, got {}", self.precision)));
        }
        Ok(p)
    }

    /// Decimal digits that resolve the requested precision, between 6 and 60.
    pub fn decimal_digits(&self) -> usize {
        let p = self.precision_value().map(|p| maxwell_ball::scalar::ratio_to_f64(&p));
        match p {
            Ok(p) if p > 0.0 => ((-p.log10()).ceil().max(0.0) as usize + 2).clamp(6, 60),
            _ => 17,
        }
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))
}
