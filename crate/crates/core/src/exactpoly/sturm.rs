use num_rational::Ratio;

use super::sign::{content, int_sign_at, primitive_part, to_primitive_int};
use super::{Poly, PolyError};
use crate::scalar::ExactInteger;

/// Next Sturm polynomial: a positive multiple of `-(a mod b)`, made primitive.
fn neg_remainder<I: ExactInteger>(a: &Poly<I>, b: &Poly<I>) -> Poly<I> {
    let m = a.degree().expect("nonzero dividend");
    let k = b.degree().expect("nonzero divisor");
    debug_assert!(m >= k);
    if m == k + 1 && k >= 1 {
        return neg_remainder_drop_one(a, b);
    }
    let bc = b.coeffs();
    let lb = &bc[k];
    let mut r: Vec<I> = a.coeffs().to_vec();
    for top in (k..=m).rev() {
        let t = std::mem::replace(&mut r[top], I::zero());
        for x in r[..top].iter_mut() {
            *x = x.clone() * lb.clone();
        }
        if t.is_zero() {
            continue;
        }
        for (j, bj) in bc[..k].iter().enumerate() {
            let idx = top - k + j;
            r[idx] = r[idx].clone() - t.clone() * bj.clone();
        }
    }
    r.truncate(k);
    // r = lb^(m-k+1) a - q b; flip so the result is a positive multiple of -(a mod b).
    let flip = !(lb.is_negative() && (m - k + 1) % 2 == 1);
    let r = if flip {
        r.into_iter().map(|c| -c).collect()
    } else {
        r
    };
    primitive_part(Poly::new(r))
}

/// Degree drops by exactly one, the generic case along a Sturm chain.
///
/// `lb^2 a = (c1 x + c0) b + rem` with `c1 = lb la`, `c0 = lb a1 - la b1`,
/// so `-rem = c1 x b + c0 b - lb^2 a`, and `lb^2 > 0`.
fn neg_remainder_drop_one<I: ExactInteger>(a: &Poly<I>, b: &Poly<I>) -> Poly<I> {
    let (ac, bc) = (a.coeffs(), b.coeffs());
    let k = bc.len() - 1;
    let (la, a1) = (&ac[k + 1], &ac[k]);
    let (lb, b1) = (&bc[k], &bc[k - 1]);
    let mut lb2 = lb.clone() * lb.clone();
    let mut c1 = lb.clone() * la.clone();
    let mut c0 = lb.clone() * a1.clone() - la.clone() * b1.clone();
    let h = lb2.gcd(&c1).gcd(&c0);
    if !h.is_one() {
        lb2 = lb2.div_exact(&h);
        c1 = c1.div_exact(&h);
        c0 = c0.div_exact(&h);
    }
    let mut r: Vec<I> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = c0.clone() * bc[j].clone() - lb2.clone() * ac[j].clone();
        if j >= 1 {
            v = v + c1.clone() * bc[j - 1].clone();
        }
        r.push(v);
    }
    let mut r = Poly::new(r);
    let g = content(r.coeffs());
    if !g.is_zero() && !g.is_one() {
        r = r.map(|c| c.div_exact(&g));
    }
    r
}

/// Streams the primitive Sturm chain of `p`, keeping two members alive.
struct SturmChain<I: ExactInteger> {
    prev: Option<Poly<I>>,
    cur: Option<Poly<I>>,
}

impl<I: ExactInteger> SturmChain<I> {
    fn new(p: &Poly<I>) -> Self {
        let p0 = primitive_part(p.clone());
        SturmChain {
            prev: None,
            cur: Some(p0),
        }
    }
}

impl<I: ExactInteger> Iterator for SturmChain<I> {
    type Item = Poly<I>;

    fn next(&mut self) -> Option<Poly<I>> {
        let cur = self.cur.take()?;
        let next = match &self.prev {
            _ if cur.degree() == Some(0) => Poly::zero(),
            None => primitive_part(cur.derivative()),
            Some(prev) => neg_remainder(prev, &cur),
        };
        if !next.is_zero() {
            self.cur = Some(next);
        }
        self.prev = Some(cur.clone());
        Some(cur)
    }
}

/// Full Sturm chain `p, p', -rem, ...`, each member primitive.
///
/// Materializes every member; counting roots streams instead.
pub fn sturm_sequence<I: ExactInteger>(p: &Poly<I>) -> Vec<Poly<I>> {
    if p.is_zero() {
        return Vec::new();
    }
    SturmChain::new(p).collect()
}

fn variations(signs: &[i8]) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for &s in signs.iter().filter(|&&s| s != 0) {
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// Distinct real roots of an integer polynomial in the open interval `(lo, hi)`.
pub fn int_sturm_root_count<I: ExactInteger>(
    p: &Poly<I>,
    lo: &Ratio<I>,
    hi: &Ratio<I>,
) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(PolyError::EmptyInterval);
    }
    if int_sign_at(p, lo) == 0 || int_sign_at(p, hi) == 0 {
        return Err(PolyError::EndpointIsRoot);
    }
    let mut at_lo = Vec::new();
    let mut at_hi = Vec::new();
    for q in SturmChain::new(p) {
        at_lo.push(int_sign_at(&q, lo));
        at_hi.push(int_sign_at(&q, hi));
    }
    Ok(variations(&at_lo).saturating_sub(variations(&at_hi)))
}

/// Distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn sturm_root_count<I: ExactInteger>(
    p: &Poly<Ratio<I>>,
    lo: &Ratio<I>,
    hi: &Ratio<I>,
) -> Result<usize, PolyError> {
    int_sturm_root_count(&to_primitive_int(p), lo, hi)
}
