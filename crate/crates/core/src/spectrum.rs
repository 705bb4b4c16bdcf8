//! Eigenvalue tables, the counting function and the asymptotic checks.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::besselpoly::{characteristic_poly_bk, characteristic_poly_direct, Branch, GammaParam};
use crate::exactpoly::{
    descartes_sign_changes, int_cauchy_dyadic_bound, int_sign_at, int_sturm_root_count, isolate_int,
    refine_int, to_primitive_int, Certificate, PolyError,
};
use crate::scalar::{rational_from_f64, ratio_to_f64};
use crate::{BigInt, BigRational, IntPoly, RatRootInterval};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("mode n = {n}: {source}")]
    Certification {
        n: usize,
        #[source]
        source: PolyError,
    },
    #[error("a spectrum table needs n_max >= 1")]
    EmptyTable,
    #[error("precision must be positive")]
    NonPositivePrecision,
    #[error("radius must be positive and finite")]
    InvalidRadius,
    #[error("radius {r} is not certified: the table ends at |λ_{n_max}| ≈ {reach}")]
    IncompleteTable { r: f64, n_max: usize, reach: f64 },
    #[error("eigenvalues of modes {n} and {} could not be separated", n + 1)]
    NotMonotone { n: usize },
    #[error("the radius grid is empty")]
    EmptyGrid,
}

fn cert_err(n: usize) -> impl Fn(PolyError) -> SpectrumError {
    move |source| SpectrumError::Certification { n, source }
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// `λ = -1/(2w)`.
fn lambda_of(w: &BigRational) -> BigRational {
    -(two() * w.clone()).recip()
}

/// Primitive integer form of the characteristic polynomial of order `n`.
pub fn characteristic_int(n: usize, gp: &GammaParam) -> IntPoly {
    to_primitive_int(&characteristic_poly_direct(n, gp))
}

/// One negative eigenvalue with its certified enclosure.
#[derive(Debug, Clone, PartialEq)]
pub struct EigMode {
    pub n: usize,
    /// Enclosure of the positive root `w_n` of the characteristic polynomial.
    pub w_interval: RatRootInterval,
    pub lambda_lo: BigRational,
    pub lambda_hi: BigRational,
    pub multiplicity: usize,
    pub z_n: f64,
    pub branch: Branch,
}

impl EigMode {
    fn from_interval(n: usize, gp: &GammaParam, iv: RatRootInterval) -> Self {
        EigMode {
            n,
            lambda_lo: lambda_of(&iv.lo),
            lambda_hi: lambda_of(&iv.hi),
            w_interval: iv,
            multiplicity: 2 * n + 1,
            z_n: gp.localization_center(n),
            branch: gp.branch(),
        }
    }

    pub fn lambda_mid(&self) -> BigRational {
        (self.lambda_lo.clone() + self.lambda_hi.clone()) / two()
    }

    pub fn lambda_mid_f64(&self) -> f64 {
        ratio_to_f64(&self.lambda_mid())
    }

    pub fn lambda_width(&self) -> BigRational {
        self.lambda_hi.clone() - self.lambda_lo.clone()
    }

    /// Signed distance `λ_n - z_n`.
    pub fn signed_gap(&self) -> f64 {
        self.lambda_mid_f64() - self.z_n
    }

    /// `|λ_n - z_n|`.
    pub fn gap(&self) -> f64 {
        self.signed_gap().abs()
    }
}

/// Bisects until both the `w` and the `λ` enclosures are at most `eps` wide.
fn refine_to(p: &IntPoly, iv: RatRootInterval, eps: &BigRational) -> Result<RatRootInterval, PolyError> {
    let mut iv = refine_int(p, &iv, eps)?;
    loop {
        if iv.is_exact() {
            return Ok(iv);
        }
        if iv.lo.is_positive() {
            let lam_width = iv.width() / (two() * iv.lo.clone() * iv.hi.clone());
            if &lam_width <= eps {
                return Ok(iv);
            }
        }
        let target = iv.width() / two();
        iv = refine_int(p, &iv, &target)?;
    }
}

/// Certified eigenvalue `λ_n` with enclosures at most `eps` wide.
pub fn eigenvalue(n: usize, gp: &GammaParam, eps: &BigRational) -> Result<EigMode, SpectrumError> {
    eigenvalue_with(n, gp, eps, Certificate::Descartes)
}

/// [`eigenvalue`] with an explicit uniqueness certificate.
pub fn eigenvalue_with(
    n: usize,
    gp: &GammaParam,
    eps: &BigRational,
    cert: Certificate,
) -> Result<EigMode, SpectrumError> {
    if n == 0 {
        return Err(SpectrumError::EmptyTable);
    }
    if !eps.is_positive() {
        return Err(SpectrumError::NonPositivePrecision);
    }
    let p = characteristic_int(n, gp);
    let iv = isolate_int(&p, cert).map_err(cert_err(n))?;
    let iv = refine_to(&p, iv, eps).map_err(cert_err(n))?;
    Ok(EigMode::from_interval(n, gp, iv))
}

/// Narrows an existing mode to enclosures at most `eps` wide.
pub fn refine_mode(mode: &mut EigMode, gp: &GammaParam, eps: &BigRational) -> Result<(), SpectrumError> {
    let p = characteristic_int(mode.n, gp);
    let iv = refine_to(&p, mode.w_interval.clone(), eps).map_err(cert_err(mode.n))?;
    let multiplicity = mode.multiplicity;
    *mode = EigMode {
        multiplicity,
        ..EigMode::from_interval(mode.n, gp, iv)
    };
    Ok(())
}

/// Eigenvalues `λ_1 > λ_2 > ... > λ_{n_max}` with certified disjoint enclosures.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub gamma_param: GammaParam,
    pub n_max: usize,
    pub precision: BigRational,
    pub certificate: Certificate,
    pub modes: Vec<EigMode>,
}

/// Builds the table for `n = 1..=n_max` on the current rayon pool.
pub fn spectrum_table(gp: &GammaParam, n_max: usize, eps: &BigRational) -> Result<SpectrumTable, SpectrumError> {
    spectrum_table_with(gp, n_max, eps, Certificate::Descartes)
}

/// [`spectrum_table`] with an explicit uniqueness certificate.
pub fn spectrum_table_with(
    gp: &GammaParam,
    n_max: usize,
    eps: &BigRational,
    cert: Certificate,
) -> Result<SpectrumTable, SpectrumError> {
    if n_max == 0 {
        return Err(SpectrumError::EmptyTable);
    }
    let mut table = SpectrumTable {
        gamma_param: gp.clone(),
        n_max: 0,
        precision: eps.clone(),
        certificate: cert,
        modes: Vec::new(),
    };
    table.extend_to(n_max)?;
    Ok(table)
}

impl SpectrumTable {
    /// Adds modes up to `n_max`, keeping the chain separated.
    pub fn extend_to(&mut self, n_max: usize) -> Result<(), SpectrumError> {
        if n_max <= self.n_max {
            return Ok(());
        }
        if !self.precision.is_positive() {
            return Err(SpectrumError::NonPositivePrecision);
        }
        let gp = &self.gamma_param;
        let (eps, cert) = (&self.precision, self.certificate);
        let fresh = (self.n_max + 1..=n_max)
            .into_par_iter()
            .map(|n| eigenvalue_with(n, gp, eps, cert))
            .collect::<Result<Vec<_>, _>>()?;
        let start = self.modes.len().saturating_sub(1);
        self.modes.extend(fresh);
        self.n_max = n_max;
        self.separate_from(start)
    }

    /// Refines neighbours until consecutive λ-enclosures are disjoint.
    fn separate_from(&mut self, start: usize) -> Result<(), SpectrumError> {
        let gp = self.gamma_param.clone();
        for i in start..self.modes.len().saturating_sub(1) {
            let mut rounds = 0;
            while self.modes[i + 1].lambda_hi >= self.modes[i].lambda_lo {
                let (lower, upper) = (&self.modes[i + 1], &self.modes[i]);
                let reversed = lower.lambda_lo > upper.lambda_hi;
                let stuck = lower.w_interval.is_exact() && upper.w_interval.is_exact();
                if reversed || stuck || rounds > 256 {
                    return Err(SpectrumError::NotMonotone { n: i + 1 });
                }
                for j in [i, i + 1] {
                    let half = self.modes[j].lambda_width() / two();
                    if half.is_positive() {
                        refine_mode(&mut self.modes[j], &gp, &half)?;
                    }
                }
                rounds += 1;
            }
        }
        Ok(())
    }

    pub fn mode(&self, n: usize) -> Option<&EigMode> {
        n.checked_sub(1).and_then(|i| self.modes.get(i))
    }

    /// First consecutive pair whose enclosures overlap or are out of order.
    pub fn monotonicity_violation(&self) -> Option<usize> {
        self.modes
            .windows(2)
            .find(|w| {
                !(w[1].lambda_hi < w[0].lambda_lo && w[1].w_interval.hi <= w[0].w_interval.lo)
                    || w[1].n != w[0].n + 1
            })
            .map(|w| w[0].n)
    }

    /// Largest `r` the table certifies: `|λ_{n_max}|` from its inner endpoint.
    pub fn certified_radius(&self) -> f64 {
        self.modes
            .last()
            .map(|m| -ratio_to_f64(&m.lambda_hi))
            .unwrap_or(0.0)
    }
}

/// Whether `|λ_n| <= r`, decided exactly.
fn within_radius(mode: &EigMode, gp: &GammaParam, r: &BigRational) -> bool {
    let neg_r = -r.clone();
    if mode.lambda_lo >= neg_r {
        return true;
    }
    if mode.lambda_hi < neg_r {
        return false;
    }
    // |λ_n| <= r iff w_n >= 1/(2r) iff the polynomial has not yet changed sign there.
    let w_star = (two() * r.clone()).recip();
    let s = int_sign_at(&characteristic_int(mode.n, gp), &w_star);
    s == 0 || s == mode.w_interval.sign_lo
}

/// `N(r) = Σ_{|λ_n| <= r} multiplicity(λ_n)`.
pub fn counting(table: &SpectrumTable, r: &BigRational) -> Result<u64, SpectrumError> {
    if !r.is_positive() {
        return Err(SpectrumError::InvalidRadius);
    }
    let last = table.modes.last().ok_or(SpectrumError::EmptyTable)?;
    if last.lambda_hi >= -r.clone() {
        return Err(SpectrumError::IncompleteTable {
            r: ratio_to_f64(r),
            n_max: table.n_max,
            reach: table.certified_radius(),
        });
    }
    let gp = &table.gamma_param;
    let k = table.modes.partition_point(|m| within_radius(m, gp, r));
    Ok(table.modes[..k].iter().map(|m| m.multiplicity as u64).sum())
}

/// [`counting`] at a float radius, taken as its exact binary value.
pub fn counting_f64(table: &SpectrumTable, r: f64) -> Result<u64, SpectrumError> {
    let r = rational_from_f64(r).ok_or(SpectrumError::InvalidRadius)?;
    counting(table, &r)
}

/// `count` evenly spaced radii on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Ordinary least squares `y ≈ a + b x`, returns `(a, b)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Summary statistics of `N(r) - (γ₀² - 1) r²`.
///
/// `N` jumps by about `2 c r` once per period `1/c`, `c = √(γ₀² - 1)`, so a
/// coarse grid can sit at one phase of that sawtooth and bias every
/// statistic. All fields are therefore computed on a grid with 16 points per
/// period spanning the caller's range.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylSummary {
    /// `γ₀² - 1`.
    pub predicted_leading: f64,
    /// Least-squares coefficient of `r²` in a fit `N ≈ a + b r²`.
    pub fitted_leading: f64,
    /// `max |residual| / r`.
    pub max_rel_residual: f64,
    /// `max |residual| / r` over the lower half of the range.
    pub lower_half_max: f64,
    /// `max |residual| / r` over the upper half of the range.
    pub upper_half_max: f64,
    /// Least-squares slope of the residual against `r`.
    pub residual_slope: f64,
    /// Slope implied by the table's own eigenvalue offsets and `2n + 1` weights:
    /// `2 (γ₀² - 1) ḡ`, with `ḡ` the mean of `λ_n - z_n` over the range's modes.
    pub predicted_slope: f64,
    /// `|residual_slope - predicted_slope|`.
    pub two_term_error: f64,
    /// Half of `√(γ₀² - 1)`, the slope shift caused by any multiplicity off by one.
    pub two_term_threshold: f64,
}

impl WeylSummary {
    pub fn relative_fit_error(&self) -> f64 {
        (self.fitted_leading / self.predicted_leading - 1.0).abs()
    }

    /// No growth of `|residual|/r` from the lower to the upper half.
    pub fn no_growth(&self) -> bool {
        self.upper_half_max <= 1.5 * self.lower_half_max
    }

    /// Fitted coefficient within `tol`, no growth of `|res|/r`, two-term terms consistent.
    pub fn passes(&self, tol: f64) -> bool {
        self.relative_fit_error() <= tol && self.no_growth() && self.two_term_error <= self.two_term_threshold
    }
}

/// `N(r)` on the caller's grid plus the summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingReport {
    pub r_grid: Vec<f64>,
    pub n_values: Vec<u64>,
    pub residuals: Vec<f64>,
    pub summary: WeylSummary,
}

fn residuals_on(table: &SpectrumTable, rs: &[f64]) -> Result<(Vec<u64>, Vec<f64>), SpectrumError> {
    let lead = table.gamma_param.weyl_coefficient();
    let ns = rs
        .par_iter()
        .map(|&r| counting_f64(table, r))
        .collect::<Result<Vec<_>, _>>()?;
    let res = rs.iter().zip(&ns).map(|(&r, &n)| n as f64 - lead * r * r).collect();
    Ok((ns, res))
}

fn summarize(table: &SpectrumTable, lo: f64, hi: f64) -> Result<WeylSummary, SpectrumError> {
    let lead = table.gamma_param.weyl_coefficient();
    let step = 1.0 / (16.0 * lead.sqrt());
    let count = (((hi - lo) / step).ceil() as usize + 1).clamp(2, 1 << 20);
    let rs = if hi > lo { uniform_grid(lo, hi, count) } else { vec![lo] };
    let (ns, res) = residuals_on(table, &rs)?;

    let rel: Vec<f64> = rs.iter().zip(&res).map(|(r, e)| e.abs() / r).collect();
    let half = rel.len() / 2;
    let max_of = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let (lower, upper) = if rel.len() > 1 {
        (max_of(&rel[..half]), max_of(&rel[half..]))
    } else {
        (rel[0], rel[0])
    };
    let r2: Vec<f64> = rs.iter().map(|r| r * r).collect();
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (_, fitted_leading) = linear_fit(&r2, &nf);
    let (_, residual_slope) = linear_fit(&rs, &res);

    let in_range: Vec<f64> = table
        .modes
        .iter()
        .filter(|m| {
            let a = -m.lambda_mid_f64();
            lo <= a && a <= hi
        })
        .map(EigMode::signed_gap)
        .collect();
    let mean_gap = if in_range.is_empty() {
        table.modes.iter().map(EigMode::signed_gap).sum::<f64>() / table.modes.len() as f64
    } else {
        in_range.iter().sum::<f64>() / in_range.len() as f64
    };
    let predicted_slope = 2.0 * lead * mean_gap;
    Ok(WeylSummary {
        predicted_leading: lead,
        fitted_leading,
        max_rel_residual: max_of(&rel),
        lower_half_max: lower,
        upper_half_max: upper,
        residual_slope,
        predicted_slope,
        two_term_error: (residual_slope - predicted_slope).abs(),
        two_term_threshold: 0.5 * lead.sqrt(),
    })
}

/// `N(r)` and its residual against `(γ₀² - 1) r²` on `r_grid`, summarized
/// over the grid's range.
pub fn weyl_residual(table: &SpectrumTable, r_grid: &[f64]) -> Result<CountingReport, SpectrumError> {
    if r_grid.is_empty() {
        return Err(SpectrumError::EmptyGrid);
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let (n_values, residuals) = residuals_on(table, &grid)?;
    let summary = summarize(table, grid[0], grid[grid.len() - 1])?;
    Ok(CountingReport {
        r_grid: grid,
        n_values,
        residuals,
        summary,
    })
}

/// Distances `|λ_n - z_n|` and their growth statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    /// `gaps[i]` belongs to `n = i + 1`.
    pub gaps: Vec<f64>,
    /// Largest observed gap, the empirical localization radius.
    pub max_gap: f64,
    pub argmax_n: usize,
}

impl LocalizationReport {
    /// Largest gap for `n` in `[lo, hi]`.
    pub fn window_max(&self, lo: usize, hi: usize) -> Option<f64> {
        let lo = lo.max(1);
        let hi = hi.min(self.gaps.len());
        (lo <= hi).then(|| self.gaps[lo - 1..hi].iter().copied().fold(0.0, f64::max))
    }

    /// `max over [mid, hi]` divided by `max over [lo, mid]`.
    pub fn growth_ratio(&self, lo: usize, mid: usize, hi: usize) -> Option<f64> {
        Some(self.window_max(mid, hi)? / self.window_max(lo, mid)?)
    }

    /// Default boundedness proxy: second half of the table within twice the first.
    pub fn bounded(&self) -> bool {
        let n = self.gaps.len();
        if n < 4 {
            return true;
        }
        self.growth_ratio(2, n / 2, n).is_some_and(|g| g <= 2.0)
    }
}

pub fn localization_check(table: &SpectrumTable) -> LocalizationReport {
    let gaps: Vec<f64> = table.modes.iter().map(EigMode::gap).collect();
    let (argmax, max_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, g)| if g > best.1 { (i, g) } else { best });
    LocalizationReport {
        gaps,
        max_gap,
        argmax_n: argmax + 1,
    }
}

/// Orders `x` against `-c₀` exactly, with `c₀ = 1/max(γ₀ - 1, √(γ₀ - 1))`.
fn cmp_with_minus_c0(x: &BigRational, gp: &GammaParam) -> Ordering {
    if !x.is_negative() {
        return Ordering::Greater;
    }
    let s = -x.clone();
    let excess = gp.gamma0().clone() - BigRational::one();
    // x > -c₀ iff s < c₀ iff s·(γ₀-1) < 1 (γ₀ >= 2) or s²·(γ₀-1) < 1 (γ₀ < 2).
    let scaled = if excess >= BigRational::one() {
        s * excess
    } else {
        s.clone() * s * excess
    };
    BigRational::one().cmp(&scaled)
}

/// Number of eigenvalues above `-c₀`; the table must reach past `-c₀`.
pub fn exceptional_count(table: &SpectrumTable) -> Result<usize, SpectrumError> {
    let gp = &table.gamma_param;
    let last = table.modes.last().ok_or(SpectrumError::EmptyTable)?;
    if cmp_with_minus_c0(&last.lambda_hi, gp) != Ordering::Less {
        return Err(SpectrumError::IncompleteTable {
            r: gp.c0(),
            n_max: table.n_max,
            reach: table.certified_radius(),
        });
    }
    let mut count = 0;
    for mode in &table.modes {
        let mut mode = mode.clone();
        for _ in 0..64 {
            let lo = cmp_with_minus_c0(&mode.lambda_lo, gp);
            let hi = cmp_with_minus_c0(&mode.lambda_hi, gp);
            if lo == hi || mode.w_interval.is_exact() {
                break;
            }
            let half = mode.lambda_width() / two();
            refine_mode(&mut mode, gp, &half)?;
        }
        if cmp_with_minus_c0(&mode.lambda_lo, gp) == Ordering::Greater {
            count += 1;
        } else if cmp_with_minus_c0(&mode.lambda_hi, gp) != Ordering::Greater {
            break;
        }
    }
    Ok(count)
}

/// Whether `γ` and `1/γ` give identical enclosures mode by mode with opposite branches.
pub fn reciprocal_symmetry_check(
    gamma: &BigRational,
    n_max: usize,
    eps: &BigRational,
) -> Result<bool, crate::besselpoly::GammaError> {
    let a = GammaParam::new(gamma.clone())?;
    let b = GammaParam::new(gamma.recip())?;
    let (ta, tb) = match (spectrum_table(&a, n_max, eps), spectrum_table(&b, n_max, eps)) {
        (Ok(ta), Ok(tb)) => (ta, tb),
        _ => return Ok(false),
    };
    let same = ta.modes.len() == tb.modes.len()
        && ta.modes.iter().zip(&tb.modes).all(|(x, y)| {
            x.lambda_lo == y.lambda_lo && x.lambda_hi == y.lambda_hi && x.branch != y.branch
        });
    Ok(same)
}

/// Per-order outcome of the two uniqueness certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniquenessRecord {
    pub n: usize,
    pub descartes: usize,
    /// `None` when the Sturm count was skipped.
    pub sturm: Option<usize>,
}

impl UniquenessRecord {
    pub fn passed(&self) -> bool {
        self.descartes == 1 && self.sturm.is_none_or(|s| s == 1)
    }
}

/// Descartes sign changes and, for `n <= sturm_n_max`, the Sturm count on
/// `(0, M)` with `M` a power-of-two Cauchy bound, for every `n` in `orders`.
pub fn uniqueness_check(
    gp: &GammaParam,
    orders: std::ops::RangeInclusive<usize>,
    sturm_n_max: usize,
) -> Result<Vec<UniquenessRecord>, SpectrumError> {
    orders
        .into_par_iter()
        .map(|n| {
            let p = characteristic_int(n, gp);
            let descartes = descartes_sign_changes(&p);
            let sturm = if n <= sturm_n_max {
                let bound = int_cauchy_dyadic_bound(&p).map_err(cert_err(n))?;
                Some(
                    int_sturm_root_count(&p, &BigRational::zero(), &bound)
                        .map_err(cert_err(n))?,
                )
            } else {
                None
            };
            Ok(UniquenessRecord { n, descartes, sturm })
        })
        .collect()
}

/// Orders in `1..=n_max` where the two constructions of the characteristic polynomial differ.
pub fn cross_construction_mismatches(gp: &GammaParam, n_max: usize) -> Vec<usize> {
    (1..=n_max)
        .into_par_iter()
        .filter(|&n| characteristic_poly_direct(n, gp) != characteristic_poly_bk(n, gp))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn eps(text: &str) -> BigRational {
        parse_rational(text).unwrap()
    }

    fn gp(text: &str) -> GammaParam {
        GammaParam::parse(text).unwrap()
    }

    #[test]
    fn first_two_modes_gamma_two() {
        let g = gp("2");
        let m1 = eigenvalue(1, &g, &eps("1e-30")).unwrap();
        let exact = -2.0 / (1.0 + 5f64.sqrt());
        assert!((m1.lambda_mid_f64() - exact).abs() < 1e-15);
        assert_eq!(m1.multiplicity, 3);
        assert_eq!(m1.branch, Branch::U);
        assert!(m1.lambda_width() <= eps("1e-30"));
        assert!(m1.w_interval.width() <= eps("1e-30"));
        let m2 = eigenvalue(2, &g, &eps("1e-30")).unwrap();
        // Independent root of 48w³ - 6w - 1 by float bisection.
        let f = |w: f64| 48.0 * w * w * w - 6.0 * w - 1.0;
        let (mut a, mut b) = (0.3, 0.5);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if f(m) < 0.0 { a = m } else { b = m }
        }
        assert!((m2.lambda_mid_f64() + 0.5 / a).abs() < 1e-12);
        // Quoted to five digits as -1.19585; the root is -1.1958233.
        assert!((m2.lambda_mid_f64() + 1.19585).abs() < 5e-5);
        assert_eq!(m2.multiplicity, 5);
    }

    #[test]
    fn localization_examples() {
        let t = spectrum_table(&gp("2"), 2, &eps("1e-30")).unwrap();
        let r = localization_check(&t);
        assert!((r.gaps[0] - 0.1985).abs() < 1e-4);
        assert!((r.gaps[1] - 0.2184).abs() < 1e-4);
        assert!((t.modes[1].z_n + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_rejects_empty() {
        assert_eq!(
            spectrum_table(&gp("2"), 0, &eps("1e-30")),
            Err(SpectrumError::EmptyTable)
        );
        assert_eq!(
            spectrum_table(&gp("2"), 3, &rat(0, 1)),
            Err(SpectrumError::NonPositivePrecision)
        );
    }

    #[test]
    fn counting_examples() {
        let t = spectrum_table(&gp("2"), 3, &eps("1e-30")).unwrap();
        assert_eq!(counting(&t, &rat(1, 1)), Ok(3));
        assert_eq!(counting(&t, &rat(13, 10)), Ok(8));
        assert_eq!(counting(&t, &rat(1, 10)), Ok(0));
        assert!(matches!(
            counting(&t, &rat(10, 1)),
            Err(SpectrumError::IncompleteTable { .. })
        ));
        assert_eq!(counting(&t, &rat(0, 1)), Err(SpectrumError::InvalidRadius));
    }

    #[test]
    fn counting_decides_radius_inside_an_enclosure() {
        // Coarse enclosures force the exact fallback.
        let t = spectrum_table(&gp("2"), 3, &eps("1/4")).unwrap();
        let lam1 = 2.0 / (1.0 + 5f64.sqrt());
        assert!(t.modes[0].lambda_lo < rat(-618, 1000));
        assert_eq!(counting_f64(&t, lam1 + 1e-9), Ok(3));
        assert_eq!(counting_f64(&t, lam1 - 1e-9), Ok(0));
    }

    #[test]
    fn exceptional_examples() {
        let t = spectrum_table(&gp("2"), 3, &eps("1e-30")).unwrap();
        assert_eq!(exceptional_count(&t), Ok(1));
        assert!(t.modes[1].lambda_hi <= rat(-1, 1));
        let t = spectrum_table(&gp("5"), 1, &eps("1e-30")).unwrap();
        // λ_1 ≈ -0.207 and c₀ = 1/4 would need λ_1 < -1/4 to be certified past.
        assert!(matches!(exceptional_count(&t), Err(SpectrumError::IncompleteTable { .. })));
    }

    #[test]
    fn minus_c0_comparison_is_exact() {
        let g = gp("2");
        assert_eq!(cmp_with_minus_c0(&rat(-1, 1), &g), Ordering::Equal);
        assert_eq!(cmp_with_minus_c0(&rat(-9, 10), &g), Ordering::Greater);
        let g = gp("3/2");
        // c₀ = √2.
        assert_eq!(cmp_with_minus_c0(&rat(-141, 100), &g), Ordering::Greater);
        assert_eq!(cmp_with_minus_c0(&rat(-142, 100), &g), Ordering::Less);
    }

    #[test]
    fn known_first_eigenvalues() {
        let m = eigenvalue(1, &gp("3/2"), &eps("1e-20")).unwrap();
        assert!(m.w_interval.is_exact());
        assert_eq!(m.lambda_lo, rat(-1, 1));
        let m = eigenvalue(1, &gp("5"), &eps("1e-20")).unwrap();
        let want = -1.0 / (2.0 * (1.0 + 2f64.sqrt()));
        assert!((m.lambda_mid_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal_symmetry_check(&rat(2, 1), 10, &eps("1e-30")), Ok(true));
        assert_eq!(reciprocal_symmetry_check(&rat(2, 3), 6, &eps("1e-30")), Ok(true));
        assert!(reciprocal_symmetry_check(&rat(1, 1), 3, &eps("1e-30")).is_err());
        let a = spectrum_table(&gp("2"), 3, &eps("1e-30")).unwrap();
        let b = spectrum_table(&gp("1/2"), 3, &eps("1e-30")).unwrap();
        assert!(a.modes.iter().all(|m| m.branch == Branch::U));
        assert!(b.modes.iter().all(|m| m.branch == Branch::V));
    }

    #[test]
    fn table_is_monotone_and_extendable() {
        let mut t = spectrum_table(&gp("3"), 20, &eps("1e-25")).unwrap();
        assert_eq!(t.monotonicity_violation(), None);
        t.extend_to(30).unwrap();
        assert_eq!(t.modes.len(), 30);
        assert_eq!(t.monotonicity_violation(), None);
        let fresh = spectrum_table(&gp("3"), 30, &eps("1e-25")).unwrap();
        assert_eq!(fresh.modes, t.modes);
    }

    #[test]
    fn coarse_precision_still_separates() {
        let t = spectrum_table(&gp("2"), 40, &eps("1")).unwrap();
        assert_eq!(t.monotonicity_violation(), None);
    }

    #[test]
    fn uniqueness_and_cross_construction_small() {
        let recs = uniqueness_check(&gp("2"), 1..=30, 30).unwrap();
        assert!(recs.iter().all(UniquenessRecord::passed));
        assert!(cross_construction_mismatches(&gp("5"), 30).is_empty());
    }

    #[test]
    fn grid_helper() {
        assert_eq!(uniform_grid(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert!(uniform_grid(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn weyl_summary_small_table() {
        let t = spectrum_table(&gp("2"), 120, &eps("1e-20")).unwrap();
        let rep = weyl_residual(&t, &uniform_grid(10.0, 60.0, 400)).unwrap();
        assert!(rep.n_values.windows(2).all(|w| w[0] <= w[1]));
        assert!(rep.summary.relative_fit_error() < 0.05);
        assert!(rep.summary.two_term_error < rep.summary.two_term_threshold);

        let mut tampered = t.clone();
        for m in &mut tampered.modes {
            m.multiplicity = 2 * m.n;
        }
        let bad = weyl_residual(&tampered, &uniform_grid(10.0, 60.0, 400)).unwrap();
        assert!(bad.summary.two_term_error > bad.summary.two_term_threshold);
    }

    #[test]
    fn weyl_summary_ignores_grid_spacing() {
        // Spacing 0.4 is about two step periods of N at γ = 5, which used to
        // land every radius on the same phase.
        let t = spectrum_table(&gp("5"), 100, &eps("1e-20")).unwrap();
        let coarse = weyl_residual(&t, &uniform_grid(2.0, 18.0, 41)).unwrap();
        let fine = weyl_residual(&t, &uniform_grid(2.0, 18.0, 1000)).unwrap();
        assert_eq!(coarse.summary, fine.summary);
        assert!(coarse.summary.two_term_error < coarse.summary.two_term_threshold);
        assert!(coarse.summary.no_growth());
        assert_eq!(coarse.n_values.len(), 41);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn counting_jumps_by_multiplicity(r_tenths in 5u32..115) {
            let t = spectrum_table(&gp("2"), 20, &eps("1e-20")).unwrap();
            let r = rat(i64::from(r_tenths), 10);
            let n = counting(&t, &r).unwrap();
            let k = t.modes.iter().filter(|m| m.lambda_mid_f64() >= -ratio_to_f64(&r)).count() as u64;
            prop_assert_eq!(n, (k + 1) * (k + 1) - 1);
        }

        #[test]
        fn enclosures_bracket_the_root(n in 1usize..40, p in 2i64..12, q in 1i64..4) {
            prop_assume!(p != q);
            let g = GammaParam::new(rat(p, q)).unwrap();
            let m = eigenvalue(n, &g, &eps("1e-20")).unwrap();
            let poly = characteristic_int(n, &g);
            prop_assert!(m.lambda_lo <= m.lambda_hi && m.lambda_hi.is_negative());
            if !m.w_interval.is_exact() {
                prop_assert_eq!(int_sign_at(&poly, &m.w_interval.lo), -1);
                prop_assert_eq!(int_sign_at(&poly, &m.w_interval.hi), 1);
            }
            prop_assert!(m.lambda_width() <= eps("1e-20"));
        }
    }
}
