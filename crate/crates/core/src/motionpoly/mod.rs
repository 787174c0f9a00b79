//! Motion polynomials: evaluation, norm polynomial, right division and
//! factorization into revolute linear factors.

mod factor;
mod polynomial;
mod realpoly;
pub mod roots;

pub use factor::{
    all_factorizations, axis_of_factor, factorize, permutations, FactorizationSetup, LinearFactor, MotionFactorization,
    DEDUP_TOL,
};
pub use polynomial::{curve_residual, is_invertible, projective_residual, MotionPolynomial};
pub use realpoly::RealPolynomial;
pub use roots::{quadratic_real_factors, real_roots};
