//! Spherical harmonics, vector harmonics and single-mode eigenfields.
//!
//! Harmonics are orthonormal on the unit sphere with the Condon–Shortley
//! phase. The eigenfield of order `(n, m)` is evaluated outside the ball from
//! the Hankel polynomial representation of the radial factor, and checked
//! against the Maxwell system and the dissipative boundary condition.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex;
use thiserror::Error;

use crate::besselpoly::{hankel_poly_eval, rational_to_real, Branch, GammaParam};
use crate::scalar::Real;
use crate::spectrum::EigMode;

/// Complex 3-vector in Cartesian components.
pub type CVec3<R> = [Complex<R>; 3];

/// Invalid mode or evaluation point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("order must satisfy |m| <= n, got n = {n}, m = {m}")]
    OrderOutOfRange { n: usize, m: i64 },
    #[error("vector harmonics need n >= 1")]
    ZeroDegree,
    #[error("lambda must be negative, got {0}")]
    NonNegativeLambda(f64),
    #[error("gamma must be positive and different from 1, got {0}")]
    BadGamma(f64),
    #[error("point at radius {r} is too close to the ball for step {step}")]
    InsideBall { r: f64, step: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
}

fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn cz<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

fn creal<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

fn scale<R: Real>(c: Complex<R>, v: &CVec3<R>) -> CVec3<R> {
    [c * v[0], c * v[1], c * v[2]]
}

fn add<R: Real>(a: &CVec3<R>, b: &CVec3<R>) -> CVec3<R> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub<R: Real>(a: &CVec3<R>, b: &CVec3<R>) -> CVec3<R> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn real_vec<R: Real>(v: [R; 3]) -> CVec3<R> {
    [creal(v[0]), creal(v[1]), creal(v[2])]
}

/// Euclidean norm of a complex vector.
pub fn norm<R: Real>(v: &CVec3<R>) -> R {
    v.iter().map(|c| c.norm_sqr()).fold(R::zero(), |a, b| a + b).sqrt()
}

/// Hermitian inner product `Σ a_k conj(b_k)`.
pub fn inner<R: Real>(a: &CVec3<R>, b: &CVec3<R>) -> Complex<R> {
    a.iter().zip(b).fold(cz(), |acc, (x, y)| acc + x * y.conj())
}

/// `ω · v` without conjugation.
pub fn dot_real<R: Real>(omega: &[R; 3], v: &CVec3<R>) -> Complex<R> {
    v[0] * omega[0] + v[1] * omega[1] + v[2] * omega[2]
}

/// `ω × v` for a real `ω`.
pub fn cross_real<R: Real>(omega: &[R; 3], v: &CVec3<R>) -> CVec3<R> {
    [
        v[2] * omega[1] - v[1] * omega[2],
        v[0] * omega[2] - v[2] * omega[0],
        v[1] * omega[0] - v[0] * omega[1],
    ]
}

/// Point on the unit sphere in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSample<R> {
    pub theta: R,
    pub phi: R,
    pub omega: [R; 3],
}

impl<R: Real> SphereSample<R> {
    pub fn new(theta: R, phi: R) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SphereSample {
            theta,
            phi,
            omega: [st * cp, st * sp, ct],
        }
    }

    /// Direction of a nonzero point, with `φ` taken in `[0, 2π)`.
    pub fn from_direction(x: &[R; 3]) -> Self {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let ct = (x[2] / r).max(-R::one()).min(R::one());
        let mut phi = x[1].atan2(x[0]);
        if phi < R::zero() {
            phi = phi + R::TAU();
        }
        Self::new(ct.acos(), phi)
    }

    fn theta_hat(&self) -> [R; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct * cp, ct * sp, -st]
    }

    fn phi_hat(&self) -> [R; 3] {
        let (sp, cp) = self.phi.sin_cos();
        [-sp, cp, R::zero()]
    }
}

/// Orthonormal associated Legendre function `P̄_n^m(cos θ)` for `0 <= m <= n`,
/// zero for `m > n`.
fn legendre_normalized<R: Real>(n: usize, m: usize, ct: R, st: R) -> R {
    if m > n {
        return R::zero();
    }
    let mut pmm = R::one() / (R::lit(4.0) * R::PI()).sqrt();
    for k in 1..=m {
        pmm = -(R::count(2 * k + 1) / R::count(2 * k)).sqrt() * st * pmm;
    }
    if n == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = R::count(2 * m + 3).sqrt() * ct * pmm;
    for l in m + 2..=n {
        let (lf, mf) = (R::count(l), R::count(m));
        let a = ((R::lit(4.0) * lf * lf - R::one()) / (lf * lf - mf * mf)).sqrt();
        let l1 = lf - R::one();
        let b = ((l1 * l1 - mf * mf) / (R::lit(4.0) * l1 * l1 - R::one())).sqrt();
        let next = a * (ct * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `P̄_n^k` for signed `k`, using `P̄_n^{-k} = (-1)^k P̄_n^k`.
fn legendre_signed<R: Real>(n: usize, k: i64, ct: R, st: R) -> R {
    let v = legendre_normalized(n, k.unsigned_abs() as usize, ct, st);
    if k < 0 && k % 2 != 0 {
        -v
    } else {
        v
    }
}

fn check_order(n: usize, m: i64) -> Result<(), FieldError> {
    if m.unsigned_abs() as usize > n {
        Err(FieldError::OrderOutOfRange { n, m })
    } else {
        Ok(())
    }
}

fn parity_sign<R: Real>(m: i64) -> R {
    if m % 2 == 0 {
        R::one()
    } else {
        -R::one()
    }
}

/// Orthonormal spherical harmonic `Y_n^m` with the Condon–Shortley phase.
pub fn sph_harm<R: Real>(n: usize, m: i64, s: &SphereSample<R>) -> Result<Complex<R>, FieldError> {
    check_order(n, m)?;
    let (st, ct) = s.theta.sin_cos();
    let k = m.unsigned_abs() as usize;
    let y = Complex::from_polar(legendre_normalized(n, k, ct, st), R::count(k) * s.phi);
    Ok(if m < 0 { y.conj() * parity_sign::<R>(m) } else { y })
}

/// Surface gradient of `Y_n^m` for `m >= 0`, finite at the poles.
fn surface_gradient_nonneg<R: Real>(n: usize, m: usize, s: &SphereSample<R>) -> CVec3<R> {
    let (st, ct) = s.theta.sin_cos();
    let (nf, mf) = (R::count(n), R::count(m));
    let half = R::lit(0.5);
    let up = ((nf + mf + R::one()) * (nf - mf)).sqrt() * legendre_signed(n, m as i64 + 1, ct, st);
    let down = ((nf + mf) * (nf - mf + R::one())).sqrt() * legendre_signed(n, m as i64 - 1, ct, st);
    let d_theta = half * (up - down);
    // m P̄_n^m / sin θ through degree n + 1, so nothing divides by sin θ
    let m_over_sin = if m == 0 {
        R::zero()
    } else {
        let c = -half * (R::count(2 * n + 1) / R::count(2 * n + 3)).sqrt();
        let a = ((nf + mf + R::one()) * (nf + mf + R::lit(2.0))).sqrt()
            * legendre_normalized(n + 1, m + 1, ct, st);
        let b = ((nf - mf + R::one()) * (nf - mf + R::lit(2.0))).sqrt()
            * legendre_normalized(n + 1, m - 1, ct, st);
        c * (a + b)
    };
    let phase = Complex::from_polar(R::one(), mf * s.phi);
    let i = Complex::new(R::zero(), R::one());
    let th = scale(phase * d_theta, &real_vec(s.theta_hat()));
    let ph = scale(i * phase * m_over_sin, &real_vec(s.phi_hat()));
    add(&th, &ph)
}

/// Tangent vector harmonics `(U_n^m, V_n^m)` with `U = ∇_S Y / √(n(n+1))`
/// and `V = ω × U`.
pub fn vector_harmonics<R: Real>(
    n: usize,
    m: i64,
    s: &SphereSample<R>,
) -> Result<(CVec3<R>, CVec3<R>), FieldError> {
    check_order(n, m)?;
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let k = m.unsigned_abs() as usize;
    let norm = creal(R::one() / R::count(n * (n + 1)).sqrt());
    let mut u = scale(norm, &surface_gradient_nonneg(n, k, s));
    if m < 0 {
        let sign = creal(parity_sign::<R>(m));
        u = u.map(|c| c.conj() * sign);
    }
    let v = cross_real(&s.omega, &u);
    Ok((u, v))
}

/// One `(n, m)` eigenmode of the exterior problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeField<R> {
    pub n: usize,
    pub m: i64,
    pub lambda: R,
    pub branch: Branch,
    pub gamma: R,
}

impl<R: Real> ModeField<R> {
    /// Branch follows from `γ`: `U` when `γ > 1`, `V` when `γ < 1`.
    pub fn new(n: usize, m: i64, lambda: R, gamma: R) -> Result<Self, FieldError> {
        check_order(n, m)?;
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if lambda.is_nan() || lambda >= R::zero() {
            return Err(FieldError::NonNegativeLambda(to_f64(lambda)));
        }
        if gamma.is_nan() || gamma <= R::zero() || gamma == R::one() {
            return Err(FieldError::BadGamma(to_f64(gamma)));
        }
        let branch = if gamma > R::one() { Branch::U } else { Branch::V };
        Ok(ModeField { n, m, lambda, branch, gamma })
    }

    /// Mode at the midpoint of a certified eigenvalue enclosure.
    pub fn from_mode(mode: &EigMode, m: i64, gp: &GammaParam) -> Result<Self, FieldError> {
        let lambda = rational_to_real(&mode.lambda_mid());
        let gamma = rational_to_real(gp.gamma());
        Self::new(mode.n, m, lambda, gamma)
    }

    /// Same mode shape with another value of `λ`, e.g. to probe a non-eigenvalue.
    pub fn with_lambda(&self, lambda: R) -> Result<Self, FieldError> {
        Self::new(self.n, self.m, lambda, self.gamma)
    }

    /// Radial factors `f = h_n(μr)` and `g = (r f)' / r` with `μ = -iλ`.
    fn radial(&self, r: R) -> (Complex<R>, Complex<R>) {
        let lr = self.lambda * r;
        let w = -R::one() / (R::lit(2.0) * lr);
        let (p, dp) = hankel_poly_eval(self.n, w);
        let phase = match self.n % 4 {
            0 => Complex::new(R::one(), R::zero()),
            1 => Complex::new(R::zero(), -R::one()),
            2 => Complex::new(-R::one(), R::zero()),
            _ => Complex::new(R::zero(), R::one()),
        };
        let e = phase * lr.exp();
        let f = e * (p / lr);
        let g = e * ((p + R::lit(2.0) * w * w * dp) / r);
        (f, g)
    }
}

/// Electric field `E` and `B = -H` of the mode at `x`, `|x| > 0`.
pub fn eigenfield<R: Real>(mode: &ModeField<R>, x: &[R; 3]) -> (CVec3<R>, CVec3<R>) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let s = SphereSample::from_direction(x);
    let y = sph_harm(mode.n, mode.m, &s).expect("mode order validated at construction");
    let (u, v) = vector_harmonics(mode.n, mode.m, &s).expect("mode order validated at construction");
    let (f, g) = mode.radial(r);
    let root = R::count(mode.n * (mode.n + 1)).sqrt();
    // curl of (-f V) is this combination, and it is divergence free
    let radial_part = scale(y * f * (root / r), &real_vec(s.omega));
    let gradient_part = add(&radial_part, &scale(g, &u));
    let rotated = scale(f, &v);
    let lam = creal(mode.lambda);
    match mode.branch {
        Branch::U => (gradient_part, scale(-lam, &rotated)),
        Branch::V => (rotated, scale(creal(R::one()) / lam, &gradient_part)),
    }
}

fn check_step<R: Real>(h: R) -> Result<(), FieldError> {
    if h > R::zero() {
        Ok(())
    } else {
        Err(FieldError::BadStep(to_f64(h)))
    }
}

fn check_outside<R: Real>(x: &[R; 3], h: R) -> Result<(), FieldError> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r >= R::one() + R::lit(2.0) * h {
        Ok(())
    } else {
        Err(FieldError::InsideBall { r: to_f64(r), step: to_f64(h) })
    }
}

/// Central-difference Jacobians `∂_j E_i` and `∂_j B_i`.
fn jacobians<R: Real>(mode: &ModeField<R>, x: &[R; 3], h: R) -> ([CVec3<R>; 3], [CVec3<R>; 3]) {
    let mut de = [[cz(); 3]; 3];
    let mut db = [[cz(); 3]; 3];
    let inv = creal(R::one() / (R::lit(2.0) * h));
    for j in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[j] = xp[j] + h;
        xm[j] = xm[j] - h;
        let (ep, bp) = eigenfield(mode, &xp);
        let (em, bm) = eigenfield(mode, &xm);
        de[j] = scale(inv, &sub(&ep, &em));
        db[j] = scale(inv, &sub(&bp, &bm));
    }
    (de, db)
}

/// `curl` from a Jacobian indexed as `d[j][i] = ∂_j F_i`.
fn curl_of<R: Real>(d: &[CVec3<R>; 3]) -> CVec3<R> {
    [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]]
}

fn div_of<R: Real>(d: &[CVec3<R>; 3]) -> Complex<R> {
    d[0][0] + d[1][1] + d[2][2]
}

/// `max |curl B - λE| + |curl E + λB|` over the points, with curls by central
/// differences of step `h`.
pub fn maxwell_residual<R: Real>(mode: &ModeField<R>, points: &[[R; 3]], h: R) -> Result<R, FieldError> {
    check_step(h)?;
    let lam = creal(mode.lambda);
    let mut worst = R::zero();
    for x in points {
        check_outside(x, h)?;
        let (de, db) = jacobians(mode, x, h);
        let (e, b) = eigenfield(mode, x);
        let ampere = sub(&curl_of(&db), &scale(lam, &e));
        let faraday = add(&curl_of(&de), &scale(lam, &b));
        worst = worst.max(norm(&ampere) + norm(&faraday));
    }
    Ok(worst)
}

/// `max |λ| (|E| + |B|)` over the points; the natural size of each curl term.
pub fn field_scale<R: Real>(mode: &ModeField<R>, points: &[[R; 3]]) -> R {
    points.iter().fold(R::zero(), |acc, x| {
        let (e, b) = eigenfield(mode, x);
        acc.max(mode.lambda.abs() * (norm(&e) + norm(&b)))
    })
}

/// Central-difference `(div E, div B)` at `x`.
pub fn divergence<R: Real>(mode: &ModeField<R>, x: &[R; 3], h: R) -> Result<(Complex<R>, Complex<R>), FieldError> {
    check_step(h)?;
    check_outside(x, h)?;
    let (de, db) = jacobians(mode, x, h);
    Ok((div_of(&de), div_of(&db)))
}

/// Tangential part `v - ⟨ω, v⟩ ω`.
pub fn tangential<R: Real>(omega: &[R; 3], v: &CVec3<R>) -> CVec3<R> {
    sub(v, &scale(dot_real(omega, v), &real_vec(*omega)))
}

/// `sup |E_tan - γ ω × B_tan| / sup |E_tan|` over points of the unit sphere.
pub fn boundary_residual<R: Real>(mode: &ModeField<R>, samples: &[SphereSample<R>]) -> R {
    let mut worst = R::zero();
    let mut size = R::zero();
    for s in samples {
        let (e, b) = eigenfield(mode, &s.omega);
        let e_tan = tangential(&s.omega, &e);
        let b_tan = tangential(&s.omega, &b);
        let mismatch = sub(&e_tan, &scale(creal(mode.gamma), &cross_real(&s.omega, &b_tan)));
        worst = worst.max(norm(&mismatch));
        size = size.max(norm(&e_tan));
    }
    worst / size
}

/// Product rule on the sphere: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature<R> {
    nodes: Vec<(SphereSample<R>, R)>,
}

impl<R: Real> SphereQuadrature<R> {
    /// `n_theta` Legendre nodes times `n_phi` equispaced azimuths.
    pub fn new(n_theta: NonZeroUsize, n_phi: NonZeroUsize) -> Self {
        let rule = GaussLegendre::new(n_theta);
        let dphi = std::f64::consts::TAU / n_phi.get() as f64;
        let mut nodes = Vec::with_capacity(n_theta.get() * n_phi.get());
        for &(x, wx) in rule.as_node_weight_pairs() {
            let theta = R::lit(x.clamp(-1.0, 1.0).acos());
            for k in 0..n_phi.get() {
                let s = SphereSample::new(theta, R::lit(k as f64 * dphi));
                nodes.push((s, R::lit(wx * dphi)));
            }
        }
        SphereQuadrature { nodes }
    }

    /// Rule for products of harmonics up to degree `n`: `2n + 2` by `4n + 4`.
    pub fn for_degree(n: usize) -> Self {
        let nt = NonZeroUsize::new(2 * n + 2).expect("positive");
        let np = NonZeroUsize::new(4 * n + 4).expect("positive");
        Self::new(nt, np)
    }

    pub fn samples(&self) -> impl Iterator<Item = &SphereSample<R>> {
        self.nodes.iter().map(|(s, _)| s)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F>(&self, mut f: F) -> Complex<R>
    where
        F: FnMut(&SphereSample<R>) -> Complex<R>,
    {
        self.nodes.iter().fold(cz(), |acc, (s, w)| acc + f(s) * *w)
    }
}

/// Largest entry of `G - I`, where `G` is the quadrature Gram matrix of all
/// `U_n^m`, `V_n^m` with `1 <= n <= n_max`.
pub fn vector_orthonormality_defect<R: Real>(n_max: usize, quad: &SphereQuadrature<R>) -> R {
    let mut table: Vec<Vec<CVec3<R>>> = Vec::new();
    for n in 1..=n_max {
        for m in -(n as i64)..=(n as i64) {
            let mut us = Vec::with_capacity(quad.len());
            let mut vs = Vec::with_capacity(quad.len());
            for s in quad.samples() {
                let (u, v) = vector_harmonics(n, m, s).expect("order in range");
                us.push(u);
                vs.push(v);
            }
            table.push(us);
            table.push(vs);
        }
    }
    let weights: Vec<R> = quad.nodes.iter().map(|(_, w)| *w).collect();
    let mut worst = R::zero();
    for (a, fa) in table.iter().enumerate() {
        for (b, fb) in table.iter().enumerate().skip(a) {
            let g: Complex<R> = fa
                .iter()
                .zip(fb)
                .zip(&weights)
                .fold(cz(), |acc, ((x, y), w)| acc + inner(x, y) * *w);
            let target = if a == b { R::one() } else { R::zero() };
            worst = worst.max((g - creal(target)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::eigenvalue;
    use crate::BigRational;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn mode_for(gamma: &str, n: usize, m: i64) -> ModeField<f64> {
        let gp = GammaParam::parse(gamma).unwrap();
        let eps: BigRational = crate::scalar::parse_rational("1e-30").unwrap();
        let em = eigenvalue(n, &gp, &eps).unwrap();
        ModeField::from_mode(&em, m, &gp).unwrap()
    }

    fn sample_points() -> Vec<[f64; 3]> {
        vec![[1.3, 0.2, -0.4], [0.1, -1.6, 0.9], [-0.7, 0.8, 1.1], [0.0, 0.3, 2.0]]
    }

    #[test]
    fn constant_and_dipole_harmonics() {
        for (t, p) in [(0.0, 0.0), (0.7, 1.2), (PI, 4.0), (2.1, 5.5)] {
            let s = SphereSample::new(t, p);
            let y00 = sph_harm(0, 0, &s).unwrap();
            assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y00.im.abs() < 1e-15);
            let y10 = sph_harm(1, 0, &s).unwrap();
            assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * t.cos()).abs() < 1e-14);
            let y11 = sph_harm(1, 1, &s).unwrap();
            let expect = Complex::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
            assert!((y11 - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn order_out_of_range_is_rejected() {
        let s = SphereSample::new(0.3, 0.1);
        assert!(matches!(sph_harm(2, 3, &s), Err(FieldError::OrderOutOfRange { .. })));
        assert!(matches!(vector_harmonics(0, 0, &s), Err(FieldError::ZeroDegree)));
        assert!(ModeField::new(1, 0, 0.5, 2.0).is_err());
        assert!(ModeField::new(1, 0, -0.5, 1.0).is_err());
        assert!(ModeField::new(1, 2, -0.5, 2.0).is_err());
    }

    #[test]
    fn scalar_harmonics_orthonormal() {
        let quad = SphereQuadrature::<f64>::for_degree(6);
        let mut idx = Vec::new();
        for n in 0..=6usize {
            for m in -(n as i64)..=(n as i64) {
                idx.push((n, m));
            }
        }
        for &(n, m) in &idx {
            for &(k, l) in &idx {
                let g = quad.integrate(|s| sph_harm(n, m, s).unwrap() * sph_harm(k, l, s).unwrap().conj());
                let target = if (n, m) == (k, l) { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-10, "({n},{m}) ({k},{l}): {g}");
            }
        }
    }

    #[test]
    fn vector_harmonics_orthonormal_to_degree_eight() {
        let quad = SphereQuadrature::<f64>::for_degree(8);
        let defect = vector_orthonormality_defect(8, &quad);
        assert!(defect < 1e-8, "defect {defect}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let h = 1e-6;
        for n in 1..=5usize {
            for m in -(n as i64)..=(n as i64) {
                let (t, p) = (0.9, 2.3);
                let s = SphereSample::new(t, p);
                let (u, _) = vector_harmonics(n, m, &s).unwrap();
                let dy_dt = (sph_harm(n, m, &SphereSample::new(t + h, p)).unwrap()
                    - sph_harm(n, m, &SphereSample::new(t - h, p)).unwrap())
                    / (2.0 * h);
                let dy_dp = (sph_harm(n, m, &SphereSample::new(t, p + h)).unwrap()
                    - sph_harm(n, m, &SphereSample::new(t, p - h)).unwrap())
                    / (2.0 * h);
                let root = ((n * (n + 1)) as f64).sqrt();
                let th = real_vec(s.theta_hat());
                let ph = real_vec(s.phi_hat());
                let u_t = u.iter().zip(&th).fold(cz(), |a, (x, y)| a + x * y);
                let u_p = u.iter().zip(&ph).fold(cz(), |a, (x, y)| a + x * y);
                assert!((u_t * root - dy_dt).norm() < 1e-7, "n={n} m={m}");
                assert!((u_p * root - dy_dp / t.sin()).norm() < 1e-7, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn pole_values_are_limits() {
        for n in 1..=4usize {
            for m in -(n as i64)..=(n as i64) {
                for (pole, near) in [(0.0, 1e-7), (PI, PI - 1e-7)] {
                    let phi = 0.8;
                    let (u0, v0) = vector_harmonics(n, m, &SphereSample::new(pole, phi)).unwrap();
                    let (u1, v1) = vector_harmonics(n, m, &SphereSample::new(near, phi)).unwrap();
                    assert!(u0.iter().chain(&v0).all(|c| c.re.is_finite() && c.im.is_finite()));
                    assert!(norm(&sub(&u0, &u1)) < 1e-5, "n={n} m={m}");
                    assert!(norm(&sub(&v0, &v1)) < 1e-5, "n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn eigenfield_satisfies_maxwell_and_boundary() {
        let mode = mode_for("2", 1, 0);
        let pts = sample_points();
        let res = maxwell_residual(&mode, &pts, 1e-4).unwrap();
        let scale = field_scale(&mode, &pts);
        assert!(res <= 1e-5 * scale, "{res} vs {scale}");
        let quad = SphereQuadrature::<f64>::for_degree(3);
        let samples: Vec<_> = quad.samples().copied().collect();
        assert!(boundary_residual(&mode, &samples) <= 1e-8);
    }

    #[test]
    fn maxwell_residual_is_second_order() {
        let mode = mode_for("3", 2, 1);
        let pts = sample_points();
        let coarse = maxwell_residual(&mode, &pts, 2e-2).unwrap();
        let fine = maxwell_residual(&mode, &pts, 1e-2).unwrap();
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn perturbed_lambda_breaks_only_the_boundary_condition() {
        let mode = mode_for("2", 1, 0);
        let off = mode.with_lambda(mode.lambda + 0.1).unwrap();
        let pts = sample_points();
        let quad = SphereQuadrature::<f64>::for_degree(3);
        let samples: Vec<_> = quad.samples().copied().collect();
        let b_true = boundary_residual(&mode, &samples);
        let b_off = boundary_residual(&off, &samples);
        assert!(b_off >= 1e2 * b_true.max(1e-16));
        let m_off = maxwell_residual(&off, &pts, 1e-4).unwrap();
        assert!(m_off <= 1e-5 * field_scale(&off, &pts));
    }

    #[test]
    fn localization_center_is_not_an_eigenvalue() {
        let mode = mode_for("2", 1, 0);
        let z1 = -(2.0f64 / 3.0).sqrt();
        let off = mode.with_lambda(z1).unwrap();
        let quad = SphereQuadrature::<f64>::for_degree(2);
        let samples: Vec<_> = quad.samples().copied().collect();
        assert!(boundary_residual(&off, &samples) > 1e-3);
    }

    #[test]
    fn reciprocal_gamma_uses_the_other_branch() {
        let quad = SphereQuadrature::<f64>::for_degree(4);
        let samples: Vec<_> = quad.samples().copied().collect();
        for g in ["2", "1/2", "5/2", "2/5"] {
            for n in 1..=3 {
                let mode = mode_for(g, n, 1);
                let expect = if mode.gamma > 1.0 { Branch::U } else { Branch::V };
                assert_eq!(mode.branch, expect);
                assert!(boundary_residual(&mode, &samples) <= 1e-8, "gamma {g} n {n}");
            }
        }
    }

    #[test]
    fn u_branch_tangential_field_is_parallel_to_u() {
        let mode = mode_for("2", 2, -1);
        for s in SphereQuadrature::<f64>::for_degree(2).samples() {
            let (e, _) = eigenfield(&mode, &s.omega);
            let e_tan = tangential(&s.omega, &e);
            let (u, _) = vector_harmonics(2, -1, s).unwrap();
            let uu = inner(&u, &u).re;
            if uu < 1e-12 {
                continue;
            }
            let c = inner(&e_tan, &u) / uu;
            assert!(norm(&sub(&e_tan, &scale(c, &u))) < 1e-12 * norm(&e_tan).max(1.0));
        }
    }

    #[test]
    fn fields_are_divergence_free() {
        for (g, n, m) in [("2", 1, 0), ("3", 3, 2), ("1/2", 2, -1)] {
            let mode = mode_for(g, n, m);
            for x in sample_points() {
                let (de, db) = divergence(&mode, &x, 1e-4).unwrap();
                let (e, b) = eigenfield(&mode, &x);
                let size = mode.lambda.abs() * (norm(&e) + norm(&b));
                assert!(de.norm() <= 1e-6 * size && db.norm() <= 1e-6 * size);
            }
        }
    }

    #[test]
    fn fields_decay_exponentially() {
        let mode = mode_for("2", 2, 1);
        let dir = SphereSample::new(1.1, 0.4).omega;
        let at = |r: f64| norm(&eigenfield(&mode, &dir.map(|c| c * r)).0);
        let base = at(1.0);
        for r in [2.0, 4.0] {
            assert!(at(r) <= base * (mode.lambda * (r - 1.0)).exp());
        }
    }

    #[test]
    fn points_too_close_to_the_ball_are_rejected() {
        let mode = mode_for("2", 1, 0);
        let err = maxwell_residual(&mode, &[[1.0, 0.0, 0.0]], 1e-4);
        assert!(matches!(err, Err(FieldError::InsideBall { .. })));
        assert!(matches!(maxwell_residual(&mode, &[], 0.0), Err(FieldError::BadStep(_))));
    }

    #[test]
    fn single_precision_harmonics() {
        let s = SphereSample::<f32>::new(0.4, 1.0);
        let (u, v) = vector_harmonics(3, 2, &s).unwrap();
        assert!(dot_real(&s.omega, &u).norm() < 1e-6);
        assert!(dot_real(&s.omega, &v).norm() < 1e-6);
        let mode = ModeField::<f32>::new(2, 1, -1.195_823_3, 2.0).unwrap();
        let samples: Vec<_> = SphereQuadrature::<f32>::for_degree(2).samples().copied().collect();
        assert!(boundary_residual(&mode, &samples) < 1e-5);
        let exact = ModeField::<f32>::new(1, 0, (1.0 - 5f32.sqrt()) / 2.0, 2.0).unwrap();
        assert!(boundary_residual(&exact, &samples) < 1e-5);
    }

    proptest! {
        #[test]
        fn harmonics_are_tangent_and_rotate(n in 1usize..9, k in 0i64..17, t in 0.0f64..PI, p in 0.0f64..TAU) {
            let m = k.rem_euclid(2 * n as i64 + 1) - n as i64;
            let s = SphereSample::new(t, p);
            let unit = s.omega.iter().map(|c| c * c).sum::<f64>().sqrt();
            prop_assert!((unit - 1.0).abs() < 1e-14);
            let (u, v) = vector_harmonics(n, m, &s).unwrap();
            prop_assert!(dot_real(&s.omega, &u).norm() < 1e-12);
            prop_assert!(dot_real(&s.omega, &v).norm() < 1e-12);
            let twice = cross_real(&s.omega, &v);
            prop_assert!(norm(&add(&twice, &u)) < 1e-12);
        }

        #[test]
        fn negative_order_is_conjugate(n in 0usize..9, k in 0i64..9, t in 0.0f64..PI, p in 0.0f64..TAU) {
            let m = k.min(n as i64);
            let s = SphereSample::new(t, p);
            let a = sph_harm(n, -m, &s).unwrap();
            let b = sph_harm(n, m, &s).unwrap().conj() * if m % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - b).norm() < 1e-13);
        }

        #[test]
        fn direction_roundtrip(t in 0.01f64..3.13, p in 0.0f64..TAU, r in 1.0f64..5.0) {
            let s = SphereSample::new(t, p);
            let back = SphereSample::from_direction(&s.omega.map(|c| c * r));
            prop_assert!((back.theta - t).abs() < 1e-10);
            prop_assert!((back.phi - p).abs() < 1e-10);
        }
    }
}
