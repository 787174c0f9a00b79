use std::ops::{Add, Mul, Sub};

use super::RealPolynomial;
use crate::quatcore::{DualQuaternion, Scalar, DEFAULT_TOL};
use crate::{Error, Result};

/// Polynomial in a real parameter `t` with dual-quaternion coefficients,
/// lowest power first. `t` commutes with every coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionPolynomial<S> {
    coeffs: Vec<DualQuaternion<S>>,
}

impl<S: Scalar> MotionPolynomial<S> {
    pub fn new(mut coeffs: Vec<DualQuaternion<S>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: DualQuaternion<S>) -> Self {
        Self::new(vec![c])
    }

    /// The linear motion polynomial `t − h`.
    pub fn linear(h: &DualQuaternion<S>) -> Self {
        Self::new(vec![-h.clone(), DualQuaternion::identity()])
    }

    /// Builds the polynomial from its eight Study coordinates, each given as
    /// a coefficient list (lowest power first).
    pub fn from_coordinates(coords: &[Vec<S>; 8]) -> Self {
        let n = coords.iter().map(Vec::len).max().unwrap_or(0);
        let coeffs = (0..n)
            .map(|k| {
                DualQuaternion::from_array(std::array::from_fn(|i| coords[i].get(k).cloned().unwrap_or_else(S::zero)))
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn from_i64_coordinates(coords: &[&[i64]; 8]) -> Self {
        Self::from_coordinates(&std::array::from_fn(|i| coords[i].iter().map(|&v| S::from_i64(v)).collect()))
    }

    /// Coordinate `i` (0..8) as a real polynomial.
    pub fn coordinate(&self, i: usize) -> RealPolynomial<S> {
        RealPolynomial::new(self.coeffs.iter().map(|c| c.to_array()[i].clone()).collect())
    }

    pub fn coordinates(&self) -> [RealPolynomial<S>; 8] {
        std::array::from_fn(|i| self.coordinate(i))
    }

    pub fn coeffs(&self) -> &[DualQuaternion<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> DualQuaternion<S> {
        self.coeffs.get(k).cloned().unwrap_or_else(DualQuaternion::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> DualQuaternion<S> {
        self.coeffs.last().cloned().unwrap_or_else(DualQuaternion::zero)
    }

    /// Horner evaluation at `t`.
    pub fn evaluate(&self, t: &S) -> DualQuaternion<S> {
        self.coeffs.iter().rev().fold(DualQuaternion::zero(), |acc, c| acc.scale(t) + c.clone())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(DualQuaternion::conj).collect())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// `q · self` for a constant dual quaternion `q`.
    pub fn left_mul(&self, q: &DualQuaternion<S>) -> Self {
        Self::new(self.coeffs.iter().map(|c| q * c).collect())
    }

    /// `self · q` for a constant dual quaternion `q`.
    pub fn right_mul(&self, q: &DualQuaternion<S>) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    /// Product with a real polynomial (central, so the side is irrelevant).
    pub fn mul_real(&self, p: &RealPolynomial<S>) -> Self {
        if self.is_zero() || p.is_zero() {
            return Self::zero();
        }
        let mut c = vec![DualQuaternion::zero(); self.coeffs.len() + p.coeffs().len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in p.coeffs().iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.scale(b);
            }
        }
        Self::new(c)
    }

    /// Coordinatewise Euclidean division by a real polynomial.
    pub fn div_rem_real(&self, p: &RealPolynomial<S>) -> (Self, Self) {
        let parts: Vec<_> = self.coordinates().iter().map(|c| c.div_rem(p)).collect();
        let q: [Vec<S>; 8] = std::array::from_fn(|i| parts[i].0.coeffs().to_vec());
        let r: [Vec<S>; 8] = std::array::from_fn(|i| parts[i].1.coeffs().to_vec());
        (Self::from_coordinates(&q), Self::from_coordinates(&r))
    }

    /// `C C*` split into its primal scalar polynomial and the largest
    /// coefficient of the remaining seven coordinates.
    fn norm_parts(&self) -> (RealPolynomial<S>, f64) {
        let prod = self * &self.conj();
        let mut residual = 0.0f64;
        for i in 1..8 {
            residual = residual.max(prod.coordinate(i).max_abs_coeff());
        }
        (prod.coordinate(0), residual)
    }

    /// Norm polynomial `ν = C C*`.
    pub fn norm_polynomial(&self) -> Result<RealPolynomial<S>> {
        self.norm_polynomial_tol(DEFAULT_TOL)
    }

    /// Fails with `NotAMotionPolynomial` when the dual part of `C C*`
    /// exceeds `tol` relative to the largest coefficient of `ν`.
    pub fn norm_polynomial_tol(&self, tol: f64) -> Result<RealPolynomial<S>> {
        let (nu, residual) = self.norm_parts();
        let bad = if S::EXACT { residual != 0.0 } else { residual > tol * nu.max_abs_coeff().max(1.0) };
        if bad {
            return Err(Error::NotAMotionPolynomial { residual });
        }
        Ok(nu)
    }

    /// Right division `self = Q·d + R` with `deg R < deg d`.
    pub fn right_divide(&self, d: &Self) -> Result<(Self, Self)> {
        let dn = d.degree().ok_or(Error::NonInvertibleLeadingCoefficient)?;
        let lead = d.leading();
        if !is_invertible(&lead, d.scale_f64()) {
            return Err(Error::NonInvertibleLeadingCoefficient);
        }
        let inv = lead.inverse().ok_or(Error::NonInvertibleLeadingCoefficient)?;
        let mut r = self.coeffs.clone();
        if r.len() <= dn {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![DualQuaternion::zero(); r.len() - dn];
        for k in (0..q.len()).rev() {
            let c = &r[k + dn] * &inv;
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - &c * dj;
            }
            r[k + dn] = DualQuaternion::zero();
            q[k] = c;
        }
        r.truncate(dn);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Largest absolute coordinate over all coefficients.
    pub fn scale_f64(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.to_f64().max_abs()))
    }

    pub fn to_f64(&self) -> MotionPolynomial<f64> {
        MotionPolynomial::new(self.coeffs.iter().map(DualQuaternion::to_f64).collect())
    }

    /// All coefficients flattened, lowest power first, padded to `len` terms.
    pub fn flat_f64(&self, len: usize) -> Vec<f64> {
        (0..len).flat_map(|k| self.coeff(k).to_f64().to_array()).collect()
    }
}

/// Invertibility test for dual quaternions: the primal norm must exceed
/// `1e-12 · scale²` (exact zero test for exact backends).
pub fn is_invertible<S: Scalar>(q: &DualQuaternion<S>, scale: f64) -> bool {
    let n = q.primal.norm_sq();
    if S::EXACT {
        !n.is_exact_zero()
    } else {
        n.to_f64() > 1e-12 * scale.max(f64::MIN_POSITIVE).powi(2)
    }
}

/// `min_λ ‖a − λ b‖ / ‖a‖` over flattened coefficient vectors.
pub fn projective_residual(a: &[f64], b: &[f64]) -> f64 {
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if aa == 0.0 {
        return if bb == 0.0 { 0.0 } else { f64::INFINITY };
    }
    if bb == 0.0 {
        return 1.0;
    }
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let lambda = ab / bb;
    let r: f64 = a.iter().zip(b).map(|(x, y)| (x - lambda * y).powi(2)).sum();
    (r / aa).sqrt()
}

/// Projective residual between two motion polynomials.
pub fn curve_residual<S: Scalar, T: Scalar>(a: &MotionPolynomial<S>, b: &MotionPolynomial<T>) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    projective_residual(&a.flat_f64(n), &b.flat_f64(n))
}

impl<S: Scalar> Add for &MotionPolynomial<S> {
    type Output = MotionPolynomial<S>;
    fn add(self, o: &MotionPolynomial<S>) -> MotionPolynomial<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        MotionPolynomial::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for &MotionPolynomial<S> {
    type Output = MotionPolynomial<S>;
    fn sub(self, o: &MotionPolynomial<S>) -> MotionPolynomial<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        MotionPolynomial::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<S: Scalar> Mul for &MotionPolynomial<S> {
    type Output = MotionPolynomial<S>;
    fn mul(self, o: &MotionPolynomial<S>) -> MotionPolynomial<S> {
        if self.is_zero() || o.is_zero() {
            return MotionPolynomial::zero();
        }
        let mut c = vec![DualQuaternion::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a * b;
            }
        }
        MotionPolynomial::new(c)
    }
}
