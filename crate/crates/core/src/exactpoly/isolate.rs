use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::sign::{int_sign_at, to_primitive_int};
use super::sturm::int_sturm_root_count;
use super::{descartes_sign_changes, Poly, PolyError, RootInterval};
use crate::scalar::ExactInteger;

/// How uniqueness of the positive root is established before bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Certificate {
    /// One coefficient sign change proves exactly one positive root.
    /// Falls back to a Sturm count when there are more sign changes.
    Descartes,
    /// Sturm count on `(0, M)` with `M` a Cauchy bound.
    #[default]
    Sturm,
    /// Both of the above must report exactly one root.
    Both,
}

/// `1 + max_k |c_k / c_d|`; every positive root lies in `(0, M)`.
pub fn cauchy_positive_bound<I: ExactInteger>(p: &Poly<Ratio<I>>) -> Result<Ratio<I>, PolyError> {
    let lead = p.leading().ok_or(PolyError::ZeroPolynomial)?.abs();
    let cs = p.coeffs();
    let max = cs[..cs.len() - 1]
        .iter()
        .map(|c| c.abs() / lead.clone())
        .fold(Ratio::zero(), |m, v| if v > m { v } else { m });
    Ok(Ratio::one() + max)
}

/// Smallest power of two that is at least the Cauchy bound of `p`.
pub fn int_cauchy_dyadic_bound<I: ExactInteger>(p: &Poly<I>) -> Result<Ratio<I>, PolyError> {
    let lead = p.leading().ok_or(PolyError::ZeroPolynomial)?.abs();
    let cs = p.coeffs();
    let max = cs[..cs.len() - 1]
        .iter()
        .map(Signed::abs)
        .fold(I::zero(), |m, v| if v > m { v } else { m });
    // Need (2^e - 1) * lead >= max.
    let mut e = 0usize;
    while (I::one().shl_bits(e) - I::one()) * lead.clone() < max {
        e += 1;
    }
    Ok(Ratio::from_integer(I::one().shl_bits(e)))
}

fn certify<I: ExactInteger>(p: &Poly<I>, hi: &Ratio<I>, cert: Certificate) -> Result<(), PolyError> {
    let sturm = || int_sturm_root_count(p, &Ratio::zero(), hi);
    let one = |count: usize| {
        if count == 1 {
            Ok(())
        } else {
            Err(PolyError::ZeroOrManyRoots { count })
        }
    };
    match cert {
        Certificate::Sturm => one(sturm()?),
        Certificate::Descartes => match descartes_sign_changes(p) {
            0 => Err(PolyError::ZeroOrManyRoots { count: 0 }),
            1 => Ok(()),
            _ => one(sturm()?),
        },
        Certificate::Both => {
            let descartes = descartes_sign_changes(p);
            let sturm = sturm()?;
            if descartes == 1 && sturm == 1 {
                Ok(())
            } else if descartes == sturm {
                Err(PolyError::ZeroOrManyRoots { count: sturm })
            } else {
                Err(PolyError::CertificateMismatch { descartes, sturm })
            }
        }
    }
}

/// Certified enclosure of the unique positive root of an integer polynomial.
///
/// The interval has dyadic endpoints and lies inside `(0, M)` for the Cauchy
/// bound `M`, so later bisection only ever evaluates at dyadic points.
pub fn isolate_int<I: ExactInteger>(
    p: &Poly<I>,
    cert: Certificate,
) -> Result<RootInterval<I>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let zero = Ratio::zero();
    let sign_lo = int_sign_at(p, &zero);
    if sign_lo == 0 {
        return Err(PolyError::EndpointIsRoot);
    }
    let cauchy = cauchy_positive_bound(&p.map(|c| Ratio::from_integer(c.clone())))?;
    let dyadic = int_cauchy_dyadic_bound(p)?;
    certify(p, &dyadic, cert)?;
    let sign_hi = int_sign_at(p, &dyadic);
    if sign_hi == sign_lo {
        return Err(PolyError::NotBracketing);
    }
    let mut iv = RootInterval {
        lo: zero,
        hi: dyadic,
        sign_lo,
        sign_hi,
    };
    // The root is below the Cauchy bound, so halving eventually pulls hi under it.
    while iv.hi > cauchy {
        iv = bisect_once(p, iv);
    }
    Ok(iv)
}

/// Certified enclosure of the unique positive root, Sturm-certified.
pub fn isolate_unique_positive_root<I: ExactInteger>(
    p: &Poly<Ratio<I>>,
) -> Result<RootInterval<I>, PolyError> {
    isolate_unique_positive_root_with(p, Certificate::Sturm)
}

/// Certified enclosure of the unique positive root with a chosen certificate.
pub fn isolate_unique_positive_root_with<I: ExactInteger>(
    p: &Poly<Ratio<I>>,
    cert: Certificate,
) -> Result<RootInterval<I>, PolyError> {
    isolate_int(&to_primitive_int(p), cert)
}

fn bisect_once<I: ExactInteger>(p: &Poly<I>, iv: RootInterval<I>) -> RootInterval<I> {
    if iv.is_exact() {
        return iv;
    }
    let mid = iv.midpoint();
    let s = int_sign_at(p, &mid);
    if s == 0 {
        RootInterval::point(mid)
    } else if s == iv.sign_lo {
        RootInterval { lo: mid, sign_lo: s, ..iv }
    } else {
        RootInterval { hi: mid, sign_hi: s, ..iv }
    }
}

/// Midpoint bisection of an enclosure down to width `<= eps`.
pub fn refine_int<I: ExactInteger>(
    p: &Poly<I>,
    iv: &RootInterval<I>,
    eps: &Ratio<I>,
) -> Result<RootInterval<I>, PolyError> {
    if !eps.is_positive() {
        return Err(PolyError::NonPositiveTolerance);
    }
    if iv.is_exact() {
        return Ok(iv.clone());
    }
    if iv.lo > iv.hi {
        return Err(PolyError::EmptyInterval);
    }
    if iv.sign_lo == 0 || iv.sign_hi == 0 || iv.sign_lo == iv.sign_hi {
        return Err(PolyError::NotBracketing);
    }
    let mut iv = iv.clone();
    while !iv.is_exact() && &iv.width() > eps {
        iv = bisect_once(p, iv);
    }
    Ok(iv)
}

/// Midpoint bisection of an enclosure of a root of `p` down to width `<= eps`.
pub fn refine<I: ExactInteger>(
    p: &Poly<Ratio<I>>,
    iv: &RootInterval<I>,
    eps: &Ratio<I>,
) -> Result<RootInterval<I>, PolyError> {
    refine_int(&to_primitive_int(p), iv, eps)
}
