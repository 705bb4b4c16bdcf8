//! Hankel polynomials, characteristic polynomials and floating-point oracles.
//!
//! For `λ < 0` the spherical Hankel function of the first kind factors as
//! `h_n(-iλ) = (-i)^n (e^λ / λ) R_n(-1/(2λ))` with
//! `R_n(w) = Σ_m (n+m)! / (m! (n-m)!) w^m`. Eigenvalues are `λ = -1/(2w)` for
//! the positive root `w` of `w² R_n'(w) + α R_n(w)`, `α = (1 - γ₀)/2`.

use std::fmt;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::exactpoly::Poly;
use crate::scalar::{from_count, parse_rational, ratio_to_f64, ExactInteger, Real};
use crate::{BigInt, BigRational, RatPoly};

/// Invalid dissipation parameter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error(transparent)]
    Parse(#[from] crate::scalar::ParseRationalError),
    #[error("gamma must be positive, got {0}")]
    NonPositive(String),
    #[error("gamma = 1 is excluded: for γ = 1 there are no eigenvalues")]
    Unity,
}

/// Failures of the floating-point oracles and exact evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BesselError {
    #[error("Hankel recurrence left the floating-point range at order {n} (lambda = {lambda})")]
    OverflowAtLargeN { n: usize, lambda: f64 },
    #[error("lambda must be negative, got {0}")]
    NonNegativeLambda(f64),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("log-derivative is not real: imaginary part {imag:e} exceeds {tol:e} relative")]
    NotReal { imag: f64, tol: f64 },
}

/// Which vector-harmonic family carries the eigenfield.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Electric field along the surface gradient family; `γ > 1`.
    U,
    /// Electric field along the rotated family; `γ < 1`.
    V,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::U => "U",
            Branch::V => "V",
        })
    }
}

/// The dissipation parameter `γ` and the quantities derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaParam {
    gamma: BigRational,
    gamma0: BigRational,
    alpha: BigRational,
    c0: f64,
}

impl GammaParam {
    pub fn new(gamma: BigRational) -> Result<Self, GammaError> {
        if !gamma.is_positive() {
            return Err(GammaError::NonPositive(gamma.to_string()));
        }
        if gamma.is_one() {
            return Err(GammaError::Unity);
        }
        let gamma0 = if gamma > BigRational::one() {
            gamma.clone()
        } else {
            gamma.recip()
        };
        let alpha = (BigRational::one() - gamma0.clone()) / BigRational::from_integer(BigInt::from(2));
        let excess = ratio_to_f64(&gamma0) - 1.0;
        let c0 = 1.0 / excess.max(excess.sqrt());
        Ok(GammaParam {
            gamma,
            gamma0,
            alpha,
            c0,
        })
    }

    /// Parses a decimal (`1.5`) or fraction (`3/2`).
    pub fn parse(text: &str) -> Result<Self, GammaError> {
        Self::new(parse_rational(text)?)
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    /// `max(γ, 1/γ)`.
    pub fn gamma0(&self) -> &BigRational {
        &self.gamma0
    }

    /// `(1 - γ₀)/2`, always negative.
    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// `1 / max(γ₀ - 1, √(γ₀ - 1))`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn gamma_f64(&self) -> f64 {
        ratio_to_f64(&self.gamma)
    }

    pub fn gamma0_f64(&self) -> f64 {
        ratio_to_f64(&self.gamma0)
    }

    /// `γ₀² - 1`, the leading Weyl coefficient.
    pub fn weyl_coefficient(&self) -> f64 {
        let g = self.gamma0_f64();
        g * g - 1.0
    }

    pub fn branch(&self) -> Branch {
        if self.gamma > BigRational::one() {
            Branch::U
        } else {
            Branch::V
        }
    }

    /// Asymptotic center `-√(n(n+1)/(γ₀² - 1))` of the n-th eigenvalue.
    pub fn localization_center(&self, n: usize) -> f64 {
        let nn = (n * (n + 1)) as f64;
        -(nn / self.weyl_coefficient()).sqrt()
    }
}

/// Integer coefficients `a_{m,n} = (n+m)! / (m! (n-m)!)`, `m = 0..=n`.
pub fn hankel_int_coeffs<I: ExactInteger>(n: usize) -> Vec<I> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a = I::one();
    out.push(a.clone());
    for m in 0..n {
        let num = from_count::<I>(n + m + 1) * from_count::<I>(n - m);
        a = (a * num).div_exact(&from_count::<I>(m + 1));
        out.push(a.clone());
    }
    out
}

/// `R_n` with exact rational coefficients.
pub fn hankel_poly_coeffs(n: usize) -> RatPoly {
    Poly::new(
        hankel_int_coeffs::<BigInt>(n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect(),
    )
}

/// `w² R_n'(w) + α R_n(w)` by polynomial arithmetic.
pub fn characteristic_poly_direct(n: usize, gp: &GammaParam) -> RatPoly {
    let r = hankel_poly_coeffs(n);
    &r.derivative().shift_up(2) + &r.scale(gp.alpha())
}

/// The same polynomial from its closed-form coefficients
/// `b_k = (n+k-1)! / ((n-k+1)! k!) · (k(k-1) + α(n+k)(n-k+1))`, `k = 0..=n+1`.
pub fn characteristic_poly_bk(n: usize, gp: &GammaParam) -> RatPoly {
    assert!(n >= 1, "characteristic polynomial needs n >= 1");
    let mut fact = vec![BigInt::one()];
    for k in 1..=2 * n {
        let next = fact[k - 1].clone() * BigInt::from(k);
        fact.push(next);
    }
    let coeffs = (0..=n + 1)
        .map(|k| {
            let ratio = BigRational::new(
                fact[n + k - 1].clone(),
                fact[n + 1 - k].clone() * fact[k].clone(),
            );
            let kk = BigRational::from_integer(BigInt::from(k * k.saturating_sub(1)));
            let span = BigRational::from_integer(BigInt::from((n + k) * (n + 1 - k)));
            ratio * (kk + gp.alpha().clone() * span)
        })
        .collect();
    Poly::new(coeffs)
}

/// `R_n(w)` and `R_n'(w)` in floating point, with coefficients built by the
/// ratio recurrence so they never pass through factorials.
pub fn hankel_poly_eval<R: Real>(n: usize, w: R) -> (R, R) {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut a = R::one();
    coeffs.push(a);
    for m in 0..n {
        a = a * R::count(n + m + 1) * R::count(n - m) / R::count(m + 1);
        coeffs.push(a);
    }
    let mut value = R::zero();
    let mut slope = R::zero();
    for &c in coeffs.iter().rev() {
        slope = slope * w + value;
        value = value * w + c;
    }
    (value, slope)
}

/// `(s_{n-1}, s_n)` with `s_k = e^{-iz} h_k(z)` at `z = -iλ`, by upward recurrence.
fn scaled_hankel_pair<R: Real>(n: usize, lam: R) -> Result<(Complex<R>, Complex<R>), BesselError> {
    let overflow = || BesselError::OverflowAtLargeN {
        n,
        lambda: lam.to_f64().unwrap_or(f64::NAN),
    };
    let i = Complex::new(R::zero(), R::one());
    let z = Complex::new(R::zero(), -lam);
    let s0 = -i / z;
    let s1 = -(z + i) / (z * z);
    if n == 0 {
        return Ok((Complex::new(R::nan(), R::nan()), s0));
    }
    let (mut prev, mut cur) = (s0, s1);
    let limit = R::max_value().sqrt();
    for k in 1..n {
        let next = cur * R::count(2 * k + 1) / z - prev;
        prev = cur;
        cur = next;
        if !(cur.re.is_finite() && cur.im.is_finite()) || cur.norm() > limit {
            return Err(overflow());
        }
    }
    Ok((prev, cur))
}

fn check_lambda<R: Real>(lam: R) -> Result<(), BesselError> {
    if lam < R::zero() {
        Ok(())
    } else {
        Err(BesselError::NonNegativeLambda(lam.to_f64().unwrap_or(f64::NAN)))
    }
}

/// `h_n(-iλ)` for `λ < 0`, from the closed forms of `h_0`, `h_1` and the
/// three-term recurrence `h_{k+1} = (2k+1)/z h_k - h_{k-1}`.
pub fn hankel_oracle<R: Real>(n: usize, lam: R) -> Result<Complex<R>, BesselError> {
    check_lambda(lam)?;
    let (_, s) = scaled_hankel_pair(n, lam)?;
    let h = s * lam.exp();
    let finite = h.re.is_finite() && h.im.is_finite();
    if !finite || (h.norm().is_zero() && !s.norm().is_zero()) {
        return Err(BesselError::OverflowAtLargeN {
            n,
            lambda: lam.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(h)
}

/// Relative tolerance on the imaginary part of a quantity that must be real.
fn realness_tolerance<R: Real>() -> R {
    R::lit(1e-10).max(R::epsilon() * R::lit(1e4))
}

/// `d/dλ log h_n(-iλ)` through `h_n' = h_{n-1} - (n+1)/z h_n`.
fn hankel_log_derivative<R: Real>(n: usize, lam: R) -> Result<R, BesselError> {
    check_lambda(lam)?;
    if n == 0 {
        return Err(BesselError::ZeroOrder);
    }
    let (prev, cur) = scaled_hankel_pair(n, lam)?;
    let i = Complex::new(R::zero(), R::one());
    let z = Complex::new(R::zero(), -lam);
    let d = -i * (prev / cur - Complex::from(R::count(n + 1)) / z);
    let tol = realness_tolerance::<R>();
    if d.im.abs() > tol * d.norm().max(R::one()) {
        return Err(BesselError::NotReal {
            imag: d.im.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(d.re)
}

/// Record of `d/dλ log h_n(-iλ)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelLogDeriv<R> {
    pub n: usize,
    pub lambda: R,
    pub value: R,
}

impl<R: Real> HankelLogDeriv<R> {
    pub fn compute(n: usize, lambda: R) -> Result<Self, BesselError> {
        Ok(HankelLogDeriv {
            n,
            lambda,
            value: hankel_log_derivative(n, lambda)?,
        })
    }
}

/// `g_n(λ) = 1/λ + d/dλ log h_n(-iλ) - γ₀`, whose zeros are the eigenvalues.
pub fn g_oracle<R: Real>(n: usize, lam: R, gp: &GammaParam) -> Result<R, BesselError> {
    let d = hankel_log_derivative(n, lam)?;
    Ok(lam.recip() + d - R::lit(gp.gamma0_f64()))
}

/// `g_n(λ)` evaluated exactly as `1 - γ₀ + 2w² R_n'(w)/R_n(w)`, `w = -1/(2λ)`.
pub fn g_exact(n: usize, lam: &BigRational, gp: &GammaParam) -> BigRational {
    assert!(lam.is_negative(), "lambda must be negative");
    let w = -(BigRational::from_integer(BigInt::from(2)) * lam.clone()).recip();
    let r = hankel_poly_coeffs(n);
    let two = BigRational::from_integer(BigInt::from(2));
    BigRational::one() - gp.gamma0().clone()
        + two * w.clone() * w.clone() * r.derivative().eval(&w) / r.eval(&w)
}

/// `(1/(2λ²)) (R_{n+1}'/R_{n+1} - R_n'/R_n)` at `w = -1/(2λ)`, exactly.
pub fn log_derivative_gap(n: usize, lam: &BigRational) -> Result<BigRational, BesselError> {
    if !lam.is_negative() {
        return Err(BesselError::NonNegativeLambda(ratio_to_f64(lam)));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let w = -(two.clone() * lam.clone()).recip();
    let quotient = |k: usize| {
        let r = hankel_poly_coeffs(k);
        r.derivative().eval(&w) / r.eval(&w)
    };
    let diff = quotient(n + 1) - quotient(n);
    Ok(diff / (two * lam.clone() * lam.clone()))
}

/// `|d/dλ log h_n(-iλ) - √(1 + n(n+1)/λ²)|`, which decays like `1/|λ|`.
pub fn logderiv_approx_error<R: Real>(n: usize, lam: R) -> Result<R, BesselError> {
    let d = hankel_log_derivative(n, lam)?;
    let symbol = (R::one() + R::count(n * (n + 1)) / (lam * lam)).sqrt();
    Ok((d - symbol).abs())
}

/// Converts an exact rational to the nearest float of type `R`.
pub fn rational_to_real<R: Real>(q: &Ratio<BigInt>) -> R {
    R::lit(ratio_to_f64(q))
}
