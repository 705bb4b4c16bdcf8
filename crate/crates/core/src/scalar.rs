//! Scalar traits shared by the exact and floating-point halves of the crate.
//!
//! The exact pipeline is generic over an integer type implementing
//! [`ExactInteger`] (big integers in production, `i64`/`i128` for small
//! cross-checks) and over the rational type `Ratio<T>` built on top of it.
//! Floating-point evaluators are generic over [`Real`], i.e. `f32` or `f64`.

use std::fmt::Debug;

use malachite_base::num::arithmetic::traits::{DivExact, DivisibleBy};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::BigInt;

/// Floating-point scalar used by the oracles and the field evaluators.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the target cannot hold it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float type")
    }

    /// Converts a count or index.
    fn count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable in target float type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Signed integer ring with gcd, used for fraction-free polynomial work.
pub trait ExactInteger: Integer + Signed + Clone + Debug + Send + Sync {
    /// Quotient of a division known to be exact.
    fn div_exact(&self, divisor: &Self) -> Self {
        self.clone() / divisor.clone()
    }

    /// Whether `divisor` divides `self`.
    fn divisible_by(&self, divisor: &Self) -> bool {
        self.is_multiple_of(divisor)
    }

    /// Number of significant bits of `|self|`.
    fn bit_len(&self) -> u64;

    /// `self * 2^bits`.
    fn shl_bits(&self, bits: usize) -> Self;

    /// `Some(e)` if `self == 2^e`.
    fn pow2_exponent(&self) -> Option<usize>;
}

macro_rules! native_exact_integer {
    ($t:ty, $width:expr) => {
        impl ExactInteger for $t {
            fn bit_len(&self) -> u64 {
                $width - u64::from(self.unsigned_abs().leading_zeros())
            }

            fn shl_bits(&self, bits: usize) -> Self {
                self.checked_mul((1 as $t).checked_shl(bits as u32).expect("shift overflow"))
                    .expect("shift overflow")
            }

            fn pow2_exponent(&self) -> Option<usize> {
                (*self > 0 && self.count_ones() == 1).then(|| self.trailing_zeros() as usize)
            }
        }
    };
}

native_exact_integer!(i64, 64);
native_exact_integer!(i128, 128);

impl ExactInteger for BigInt {
    fn div_exact(&self, divisor: &Self) -> Self {
        let n: &malachite_nz::integer::Integer = self.into();
        let d: &malachite_nz::integer::Integer = divisor.into();
        BigInt::from(n.div_exact(d))
    }

    fn divisible_by(&self, divisor: &Self) -> bool {
        let n: &malachite_nz::integer::Integer = self.into();
        let d: &malachite_nz::integer::Integer = divisor.into();
        n.divisible_by(d)
    }

    fn bit_len(&self) -> u64 {
        self.bits()
    }

    fn shl_bits(&self, bits: usize) -> Self {
        self << bits
    }

    fn pow2_exponent(&self) -> Option<usize> {
        if !self.is_positive() {
            return None;
        }
        let tz = self.trailing_zeros()?;
        (tz + 1 == self.bits()).then_some(tz as usize)
    }
}

/// Builds `k` in any numeric ring by binary expansion.
pub fn from_count<T: Num + Clone>(k: usize) -> T {
    let mut acc = T::zero();
    let mut pow = T::one();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc + pow.clone();
        }
        pow = pow.clone() + pow;
        k >>= 1;
    }
    acc
}

/// Nearest `f64` to an exact rational, robust to huge numerators and denominators.
pub fn ratio_to_f64(q: &Ratio<BigInt>) -> f64 {
    let (n, d) = (q.numer(), q.denom());
    if n.bits() <= 1000 && d.bits() <= 1000 {
        if let (Some(nf), Some(df)) = (n.to_f64(), d.to_f64()) {
            return nf / df;
        }
    }
    // Keep 64 significant bits of each operand and restore the exponent afterwards.
    let ns = n.bits().saturating_sub(64);
    let ds = d.bits().saturating_sub(64);
    let nf = (n >> ns as usize).to_f64().unwrap_or(0.0);
    let df = (d >> ds as usize).to_f64().unwrap_or(1.0);
    let exp = ns as i64 - ds as i64;
    let mut v = nf / df;
    // powi saturates, so apply the exponent in steps.
    let mut e = exp;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        e -= step;
        if v == 0.0 || v.is_infinite() {
            break;
        }
    }
    v
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Ratio<BigInt>> {
    if !x.is_finite() {
        return None;
    }
    let (mantissa, exponent, sign) = Float::integer_decode(x);
    let mut num = BigInt::from(mantissa);
    if sign < 0 {
        num = -num;
    }
    let shift = exponent.unsigned_abs() as usize;
    Some(if exponent >= 0 {
        Ratio::from_integer(num << shift)
    } else {
        Ratio::new(num, BigInt::from(1u8) << shift)
    })
}

/// Parse failure for an exact rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as an exact rational (expected decimal like 1.5e-3 or fraction like 3/2)")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, an integer, or a decimal with optional exponent into an exact rational.
pub fn parse_rational(text: &str) -> Result<Ratio<BigInt>, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Ratio::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int_part.len() + frac_part.len() == 0 || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(err());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut num: BigInt = joined.parse().map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let scale = exp - i32::try_from(frac_part.len()).map_err(|_| err())?;
    let ten = BigInt::from(10u32);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        Ratio::from_integer(num * pow)
    } else {
        Ratio::new(num, pow)
    })
}
