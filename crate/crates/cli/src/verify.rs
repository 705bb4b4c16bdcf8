//! The `verify` suite: every structural property of the spectrum as one report.

use maxwell_ball::besselpoly::{g_oracle, log_derivative_gap, logderiv_approx_error, BesselError};
use maxwell_ball::fields::{boundary_residual, field_scale, maxwell_residual, ModeField, SphereQuadrature};
use maxwell_ball::spectrum::{
    cross_construction_mismatches, exceptional_count, localization_check, reciprocal_symmetry_check,
    spectrum_table, uniform_grid, uniqueness_check, weyl_residual, SpectrumTable,
};
use maxwell_ball::{BigInt, BigRational, GammaParam};
use num_traits::Signed;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Deliberate corruption of the table, used to prove that checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Give every mode multiplicity `2n` instead of `2n + 1`.
    Multiplicity2n,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Largest order that also gets a Sturm count; Descartes covers the rest.
    pub sturm_n_max: usize,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(statistic: f64, threshold: f64, detail: String) -> Self {
        CheckResult {
            passed: statistic <= threshold,
            statistic,
            threshold,
            detail,
        }
    }

    fn failed(detail: String) -> Self {
        CheckResult {
            passed: false,
            statistic: f64::NAN,
            threshold: f64::NAN,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checks {
    pub uniqueness: CheckResult,
    pub monotonicity: CheckResult,
    pub oracle: CheckResult,
    pub localization: CheckResult,
    pub weyl: CheckResult,
    pub exceptional: CheckResult,
    pub reciprocal: CheckResult,
    pub prop31: CheckResult,
    pub approx42: CheckResult,
    pub fields: CheckResult,
    pub cross_construction: CheckResult,
}

impl Checks {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &CheckResult)> {
        [
            ("uniqueness", &self.uniqueness),
            ("monotonicity", &self.monotonicity),
            ("oracle", &self.oracle),
            ("localization", &self.localization),
            ("weyl", &self.weyl),
            ("exceptional", &self.exceptional),
            ("reciprocal", &self.reciprocal),
            ("prop31", &self.prop31),
            ("approx42", &self.approx42),
            ("fields", &self.fields),
            ("cross_construction", &self.cross_construction),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub gamma: String,
    pub n_max: usize,
    pub precision: String,
    pub passed: bool,
    pub failed: Vec<String>,
    pub checks: Checks,
}

/// Deterministic negative rationals spread over roughly `(-4000, 0)`.
pub fn sample_negative_rationals(count: usize) -> Vec<BigRational> {
    (1..=count as i64)
        .map(|k| {
            let p = 1 + (k * 7919) % 4001;
            let q = 1 + (k * 104_729) % 97;
            BigRational::new(BigInt::from(-p), BigInt::from(q))
        })
        .collect()
}

/// Orders and `λ` values of the approximation-envelope check.
pub const ENVELOPE_ORDERS: [usize; 4] = [1, 5, 10, 20];
pub const ENVELOPE_LAMBDAS: [f64; 4] = [-10.0, -20.0, -40.0, -80.0];

/// `max_λ err·|λ| / (err·|λ|)(λ = -80)` for one order.
pub fn envelope_ratio(n: usize) -> Result<f64, BesselError> {
    let scaled = ENVELOPE_LAMBDAS
        .iter()
        .map(|&l| logderiv_approx_error(n, l).map(|e| e * l.abs()))
        .collect::<Result<Vec<_>, _>>()?;
    let last = scaled[scaled.len() - 1];
    Ok(scaled.iter().copied().fold(0.0, f64::max) / last)
}

/// Orders used by the field residual check.
pub const FIELD_MODES: [(usize, i64); 3] = [(1, 0), (2, 1), (3, -2)];

/// Off-ball points where the curl residual is sampled.
pub fn field_points() -> Vec<[f64; 3]> {
    vec![[1.3, 0.2, -0.4], [0.1, -1.6, 0.9], [-0.7, 0.8, 1.1], [0.0, 0.3, 2.0], [1.5, 1.5, 0.0]]
}

/// Residuals of one certified mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldResiduals {
    pub n: usize,
    pub m: i64,
    pub lambda: f64,
    pub boundary: f64,
    pub maxwell: f64,
    /// Curl residual at step `h` over the residual at `h/2`.
    pub order_ratio: f64,
}

/// Boundary and curl residuals; the curl residual is relative to `|λ|(|E| + |B|)`.
pub fn field_residuals(mode: &ModeField<f64>, fd_step: f64) -> Result<FieldResiduals, CliError> {
    let quad = SphereQuadrature::<f64>::for_degree(mode.n + 1);
    let samples: Vec<_> = quad.samples().copied().collect();
    let pts = field_points();
    let bad = |e: maxwell_ball::fields::FieldError| CliError::BadInput(e.to_string());
    let scale = field_scale(mode, &pts);
    let full = maxwell_residual(mode, &pts, fd_step).map_err(bad)?;
    let half = maxwell_residual(mode, &pts, fd_step / 2.0).map_err(bad)?;
    Ok(FieldResiduals {
        n: mode.n,
        m: mode.m,
        lambda: mode.lambda,
        boundary: boundary_residual(mode, &samples),
        maxwell: full / scale,
        order_ratio: full / half,
    })
}

fn uniqueness(gp: &GammaParam, n_max: usize, sturm_n_max: usize) -> CheckResult {
    match uniqueness_check(gp, 1..=n_max, sturm_n_max) {
        Ok(records) => {
            let bad: Vec<usize> = records.iter().filter(|r| !r.passed()).map(|r| r.n).collect();
            CheckResult::at_most(
                bad.len() as f64,
                0.0,
                format!(
                    "Descartes n <= {n_max}, Sturm n <= {}; failing orders {bad:?}",
                    sturm_n_max.min(n_max)
                ),
            )
        }
        Err(e) => CheckResult::failed(e.to_string()),
    }
}

fn monotonicity(table: &SpectrumTable) -> CheckResult {
    let v = table.monotonicity_violation();
    CheckResult::at_most(
        v.map_or(0.0, |_| 1.0),
        0.0,
        match v {
            Some(n) => format!("intervals of n = {n} and {} overlap or are out of order", n + 1),
            None => format!("{} disjoint decreasing intervals", table.modes.len()),
        },
    )
}

fn oracle(table: &SpectrumTable) -> CheckResult {
    let gp = &table.gamma_param;
    let mut worst: f64 = 0.0;
    let (mut used, mut skipped) = (0, 0);
    for mode in table.modes.iter().take(100) {
        match g_oracle(mode.n, mode.lambda_mid_f64(), gp) {
            Ok(g) => {
                worst = worst.max(g.abs());
                used += 1;
            }
            Err(BesselError::OverflowAtLargeN { .. }) => skipped += 1,
            Err(e) => return CheckResult::failed(format!("n = {}: {e}", mode.n)),
        }
    }
    CheckResult::at_most(
        worst,
        1e-8 * (1.0 + gp.gamma0_f64()),
        format!("max |g_n(λ_n)| over {used} orders, {skipped} outside float range"),
    )
}

fn localization(table: &SpectrumTable) -> CheckResult {
    let report = localization_check(table);
    let n = report.gaps.len();
    let lo = 10.min(n / 4).max(1);
    let ratio = report.growth_ratio(lo, n / 2, n).filter(|_| n >= 4).unwrap_or(0.0);
    CheckResult::at_most(
        ratio,
        2.0,
        format!(
            "max gap on [{}, {n}] over max gap on [{lo}, {}]; empirical a(γ) = {:.6} at n = {}",
            n / 2,
            n / 2,
            report.max_gap,
            report.argmax_n
        ),
    )
}

/// Grid for the Weyl fit: `count` radii across the certified range.
pub fn weyl_grid(table: &SpectrumTable, r_max: Option<f64>, count: usize) -> Vec<f64> {
    let reach = table.certified_radius();
    let hi = r_max.unwrap_or(0.9 * reach).min(0.9 * reach);
    uniform_grid(hi / 9.0, hi, count)
}

fn weyl(table: &SpectrumTable, r_max: Option<f64>) -> CheckResult {
    let grid = weyl_grid(table, r_max, 41);
    match weyl_residual(table, &grid) {
        Ok(rep) => {
            let s = &rep.summary;
            let growth_ok = s.no_growth();
            CheckResult {
                passed: growth_ok && s.two_term_error <= s.two_term_threshold,
                statistic: s.two_term_error,
                threshold: s.two_term_threshold,
                detail: format!(
                    "r in [{:.3}, {:.3}]: fitted leading {:.6} vs {:.6}; residual slope {:.6} vs predicted {:.6}; max|res|/r lower {:.4} upper {:.4}",
                    grid[0],
                    grid[grid.len() - 1],
                    s.fitted_leading,
                    s.predicted_leading,
                    s.residual_slope,
                    s.predicted_slope,
                    s.lower_half_max,
                    s.upper_half_max
                ),
            }
        }
        Err(e) => CheckResult::failed(e.to_string()),
    }
}

fn exceptional(table: &SpectrumTable) -> CheckResult {
    match exceptional_count(table) {
        Ok(k) => CheckResult::at_most(
            k as f64,
            1.0,
            format!("eigenvalues above -c0 = {:.6}", -table.gamma_param.c0()),
        ),
        Err(e) => CheckResult::failed(e.to_string()),
    }
}

fn reciprocal(gp: &GammaParam, n_max: usize, eps: &BigRational) -> CheckResult {
    let n = n_max.min(50);
    match reciprocal_symmetry_check(gp.gamma(), n, eps) {
        Ok(same) => CheckResult::at_most(
            if same { 0.0 } else { 1.0 },
            0.0,
            format!("γ and 1/γ intervals compared for n <= {n}"),
        ),
        Err(e) => CheckResult::failed(e.to_string()),
    }
}

fn prop31(n_max: usize) -> CheckResult {
    let n_top = n_max.min(50);
    let samples = sample_negative_rationals(40);
    let mut bad = 0usize;
    for n in 1..=n_top {
        for lam in &samples {
            match log_derivative_gap(n, lam) {
                Ok(v) if v.is_positive() => {}
                _ => bad += 1,
            }
        }
    }
    CheckResult::at_most(
        bad as f64,
        0.0,
        format!("exact sign at {} points for n <= {n_top}", samples.len() * n_top),
    )
}

fn approx42() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n in ENVELOPE_ORDERS {
        match envelope_ratio(n) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return CheckResult::failed(format!("n = {n}: {e}")),
        }
    }
    CheckResult::at_most(
        worst,
        3.0,
        format!("max over λ of err·|λ| relative to λ = -80, n in {ENVELOPE_ORDERS:?}"),
    )
}

fn fields(table: &SpectrumTable) -> CheckResult {
    let gp = &table.gamma_param;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (n, m) in FIELD_MODES {
        let Some(mode) = table.mode(n) else { continue };
        let res = ModeField::from_mode(mode, m, gp)
            .map_err(|e| CliError::BadInput(e.to_string()))
            .and_then(|f| field_residuals(&f, 1e-4));
        match res {
            Ok(r) => {
                let order_off = if (3.0..=5.0).contains(&r.order_ratio) { 0.0 } else { f64::INFINITY };
                worst = worst.max(r.boundary / 1e-8).max(r.maxwell / 1e-5).max(order_off);
                parts.push(format!(
                    "({n},{m}): boundary {:.2e}, maxwell {:.2e}, order ratio {:.3}",
                    r.boundary, r.maxwell, r.order_ratio
                ));
            }
            Err(e) => return CheckResult::failed(format!("({n},{m}): {e}")),
        }
    }
    CheckResult::at_most(
        worst,
        1.0,
        format!("largest residual over its tolerance; {}", parts.join("; ")),
    )
}

fn cross_construction(gp: &GammaParam, n_max: usize) -> CheckResult {
    let n = n_max.min(300);
    let bad = cross_construction_mismatches(gp, n);
    CheckResult::at_most(
        bad.len() as f64,
        0.0,
        format!("two constructions compared for n <= {n}; mismatching orders {bad:?}"),
    )
}

fn apply_fault(table: &mut SpectrumTable, fault: Fault) {
    match fault {
        Fault::Multiplicity2n => {
            for m in &mut table.modes {
                m.multiplicity = 2 * m.n;
            }
        }
    }
}

pub fn run_verify(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let gp = cfg.gamma_param()?;
    let eps = cfg.precision_value()?;
    let mut table = spectrum_table(&gp, cfg.n_max, &eps)?;
    if let Some(f) = opts.fault {
        apply_fault(&mut table, f);
    }
    let checks = Checks {
        uniqueness: uniqueness(&gp, cfg.n_max, opts.sturm_n_max),
        monotonicity: monotonicity(&table),
        oracle: oracle(&table),
        localization: localization(&table),
        weyl: weyl(&table, cfg.r_max),
        exceptional: exceptional(&table),
        reciprocal: reciprocal(&gp, cfg.n_max, &eps),
        prop31: prop31(cfg.n_max),
        approx42: approx42(),
        fields: fields(&table),
        cross_construction: cross_construction(&gp, cfg.n_max),
    };
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, c)| !c.passed)
        .map(|(k, _)| k.to_string())
        .collect();
    Ok(VerifyReport {
        gamma: cfg.gamma.clone(),
        n_max: cfg.n_max,
        precision: cfg.precision.clone(),
        passed: failed.is_empty(),
        failed,
        checks,
    })
}
