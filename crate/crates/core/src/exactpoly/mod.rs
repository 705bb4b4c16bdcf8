//! Exact univariate polynomials and certified real root isolation.
//!
//! Coefficients are stored by ascending power. Rational polynomials are
//! converted to primitive integer polynomials before any sign evaluation or
//! Sturm computation, so the hot loops only touch integers.

mod isolate;
mod sign;
mod sturm;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Num, Signed, Zero};
use thiserror::Error;

use crate::scalar::{from_count, ExactInteger};

pub use isolate::{
    cauchy_positive_bound, int_cauchy_dyadic_bound, isolate_int, isolate_unique_positive_root,
    isolate_unique_positive_root_with, refine, refine_int, Certificate,
};
pub use sign::{eval_sign, int_sign_at, to_primitive_int};
pub use sturm::{int_sturm_root_count, sturm_root_count, sturm_sequence};

/// Failures of the exact root machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial vanishes at an interval endpoint")]
    EndpointIsRoot,
    #[error("expected exactly one root, found {count}")]
    ZeroOrManyRoots { count: usize },
    #[error("Descartes and Sturm disagree: {descartes} sign changes, {sturm} roots")]
    CertificateMismatch { descartes: usize, sturm: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("interval is empty (lo >= hi)")]
    EmptyInterval,
    #[error("interval endpoints do not bracket a sign change")]
    NotBracketing,
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
}

/// Dense polynomial, coefficients by ascending power, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> T
    where
        T: Clone,
    {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn map<U: Zero>(&self, f: impl FnMut(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Num + Clone> Poly<T> {
    pub fn monomial(c: T, k: usize) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * from_count::<T>(k))
                .collect(),
        )
    }

    /// Horner evaluation in the coefficient ring.
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![T::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }
}

impl<T: Signed> Poly<T> {
    /// Strict sign changes in the coefficient sequence, zeros skipped.
    pub fn descartes_sign_changes(&self) -> usize {
        descartes_sign_changes(self)
    }
}

/// Strict sign changes in the coefficient sequence, zeros skipped.
pub fn descartes_sign_changes<T: Signed>(p: &Poly<T>) -> usize {
    let mut changes = 0;
    let mut prev: Option<bool> = None;
    for c in p.coeffs.iter().filter(|c| !c.is_zero()) {
        let pos = c.is_positive();
        if prev.is_some_and(|q| q != pos) {
            changes += 1;
        }
        prev = Some(pos);
    }
    changes
}

/// Formal derivative of `p`.
pub fn derivative<T: Num + Clone>(p: &Poly<T>) -> Poly<T> {
    p.derivative()
}

impl<T: Num + Clone> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Num + Clone> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Num + Clone> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Num + Clone + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: fmt::Display + Zero> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*w")?,
                _ => write!(f, "({c})*w^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

/// Open interval `(lo, hi)` holding exactly one root, or the point `[lo, lo]`
/// when a bisection midpoint hit the root exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootInterval<I: ExactInteger> {
    pub lo: Ratio<I>,
    pub hi: Ratio<I>,
    pub sign_lo: i8,
    pub sign_hi: i8,
}

impl<I: ExactInteger> RootInterval<I> {
    /// Degenerate enclosure of an exact root.
    pub fn point(x: Ratio<I>) -> Self {
        RootInterval {
            lo: x.clone(),
            hi: x,
            sign_lo: 0,
            sign_hi: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Ratio<I> {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> Ratio<I> {
        (self.lo.clone() + self.hi.clone()) / from_count::<Ratio<I>>(2)
    }

    /// Closed containment; an open enclosure contains its root strictly inside.
    pub fn contains(&self, x: &Ratio<I>) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}
