//! Exact negative spectrum of the dissipative Maxwell generator outside the unit ball.
//!
//! The negative eigenvalues are `λ_n = -1/(2 w_n)` where `w_n` is the unique
//! positive root of a degree `n + 1` integer polynomial built from the
//! coefficients of the spherical Hankel function `h_n`. Everything on the
//! eigenvalue path is exact: roots are isolated and refined with big-integer
//! sign evaluation, so every reported interval is a certified enclosure.
//!
//! Modules:
//! - [`exactpoly`]: polynomials, exact signs, Descartes/Sturm counts, bisection.
//! - [`besselpoly`]: Hankel polynomials, characteristic polynomials, float oracles.
//! - [`spectrum`]: eigenvalue tables, counting function, asymptotic checks.
//! - [`fields`]: spherical harmonics and eigenfield residuals.

pub mod besselpoly;
pub mod exactpoly;
pub mod fields;
pub mod scalar;
pub mod spectrum;

pub use malachite_bigint::BigInt;
use num_rational::Ratio;

/// Exact rational over big integers.
pub type BigRational = Ratio<BigInt>;
/// Polynomial with exact rational coefficients.
pub type RatPoly = exactpoly::Poly<BigRational>;
/// Polynomial with big integer coefficients.
pub type IntPoly = exactpoly::Poly<BigInt>;
/// Root enclosure with big rational endpoints.
pub type RatRootInterval = exactpoly::RootInterval<BigInt>;

/// Double-precision eigenfield evaluator.
pub type ModeField64 = fields::ModeField<f64>;
/// Single-precision eigenfield evaluator.
pub type ModeField32 = fields::ModeField<f32>;

pub use besselpoly::{Branch, GammaParam};
pub use exactpoly::{Certificate, Poly, PolyError, RootInterval};
pub use scalar::{ExactInteger, Real};
pub use spectrum::{EigMode, SpectrumError, SpectrumTable};
