use num_rational::Ratio;

use super::Poly;
use crate::scalar::ExactInteger;

/// Positive rational multiple of `p` with coprime integer coefficients.
///
/// Roots and signs are unchanged, so every exact query can run on the result.
pub fn to_primitive_int<I: ExactInteger>(p: &Poly<Ratio<I>>) -> Poly<I> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(I::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<I> = p
        .coeffs()
        .iter()
        .map(|c| c.numer().clone() * lcm.div_exact(c.denom()))
        .collect();
    primitive_part(Poly::new(ints))
}

/// Divides out the positive gcd of the coefficients.
pub(crate) fn primitive_part<I: ExactInteger>(p: Poly<I>) -> Poly<I> {
    let g = content(p.coeffs());
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.map(|c| c.div_exact(&g))
}

/// Nonnegative gcd of a slice, found by testing divisibility before reducing.
pub(crate) fn content<I: ExactInteger>(cs: &[I]) -> I {
    let mut it = cs.iter().rev().filter(|c| !c.is_zero());
    let Some(first) = it.next() else {
        return I::zero();
    };
    let mut g = first.abs();
    for c in it {
        if g.is_one() {
            break;
        }
        if !c.divisible_by(&g) {
            g = g.gcd(c);
        }
    }
    g
}

fn sign_of<I: ExactInteger>(v: &I) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact sign of an integer polynomial at `x = a/b`.
///
/// Evaluates the homogenized sum `Σ c_k a^k b^(d-k)`, which has the sign of
/// `p(a/b)` because `b > 0`. Dyadic `b` turns the powers of `b` into shifts.
pub fn int_sign_at<I: ExactInteger>(p: &Poly<I>, x: &Ratio<I>) -> i8 {
    let cs = p.coeffs();
    let Some(d) = p.degree() else {
        return 0;
    };
    let (a, b) = (x.numer(), x.denom());
    if a.is_zero() {
        return sign_of(&cs[0]);
    }
    let mut acc = cs[d].clone();
    if let Some(e) = b.pow2_exponent() {
        for (j, c) in cs[..d].iter().rev().enumerate() {
            acc = acc * a.clone();
            if !c.is_zero() {
                acc = acc + c.shl_bits(e * (j + 1));
            }
        }
    } else {
        let mut bpow = I::one();
        for c in cs[..d].iter().rev() {
            acc = acc * a.clone();
            bpow = bpow * b.clone();
            if !c.is_zero() {
                acc = acc + c.clone() * bpow.clone();
            }
        }
    }
    sign_of(&acc)
}

/// Exact sign of `p(x)` in `{-1, 0, 1}`.
pub fn eval_sign<I: ExactInteger>(p: &Poly<Ratio<I>>, x: &Ratio<I>) -> i8 {
    int_sign_at(&to_primitive_int(p), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BigInt, BigRational, RatPoly};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rp(c: &[i64]) -> RatPoly {
        Poly::new(c.iter().map(|&v| rat(v, 1)).collect())
    }

    #[test]
    fn sign_examples() {
        let p = rp(&[-1, -2, 4]);
        assert_eq!(eval_sign(&p, &rat(1, 1)), 1);
        assert_eq!(eval_sign(&p, &rat(1, 2)), -1);
        assert_eq!(eval_sign(&rp(&[-3, 1]), &rat(3, 1)), 0);
        assert_eq!(eval_sign(&RatPoly::zero(), &rat(3, 1)), 0);
    }

    #[test]
    fn primitive_conversion() {
        let p = Poly::new(vec![rat(-1, 2), rat(-1, 1), rat(2, 1)]);
        let q = to_primitive_int(&p);
        assert_eq!(q.coeffs(), &[BigInt::from(-1), BigInt::from(-2), BigInt::from(4)]);
        let p = Poly::new(vec![rat(6, 1), rat(9, 1), rat(-12, 1)]);
        assert_eq!(
            to_primitive_int(&p).coeffs(),
            &[BigInt::from(2), BigInt::from(3), BigInt::from(-4)]
        );
    }

    #[test]
    fn content_handles_zeros_and_signs() {
        let cs: Vec<i64> = vec![0, -12, 18, 0, 30];
        assert_eq!(content(&cs), 6);
        assert_eq!(content::<i64>(&[]), 0);
        assert_eq!(content::<i64>(&[0, 0]), 0);
    }

    proptest! {
        #[test]
        fn homogenized_sign_matches_rational_horner(
            c in prop::collection::vec(-40i64..40, 1..9),
            num in -300i64..300,
            den_pow in 0u32..6,
            odd in 1i64..8,
        ) {
            let p = rp(&c);
            for den in [1i64 << den_pow, (1i64 << den_pow) * (2 * odd + 1)] {
                let x = rat(num, den);
                let v = p.eval(&x);
                let expect = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
                prop_assert_eq!(eval_sign(&p, &x), expect);
            }
        }

        #[test]
        fn primitive_form_is_positive_multiple(
            c in prop::collection::vec((-40i64..40, 1i64..12), 1..8),
        ) {
            let p: RatPoly = Poly::new(c.iter().map(|&(n, d)| rat(n, d)).collect());
            let q = to_primitive_int(&p);
            prop_assert_eq!(p.degree(), q.degree());
            if let Some(lead) = p.leading() {
                let ratio = BigRational::from(q.leading().unwrap().clone()) / lead.clone();
                prop_assert!(ratio.is_positive());
                let back = p.scale(&ratio);
                let qr: RatPoly = q.map(|v| BigRational::from(v.clone()));
                prop_assert_eq!(back, qr);
            }
        }
    }
}
