use std::ops::{Add, Mul, Neg, Sub};

use crate::quatcore::Scalar;

/// Univariate polynomial with scalar coefficients, lowest power first.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPolynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> RealPolynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `t − r`.
    pub fn linear_root(r: S) -> Self {
        Self::new(vec![-r, S::one()])
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| S::from_i64(v)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, t: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(S::one() / self.leading()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * S::from_i64(k as i64)).collect())
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dn = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dn {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![S::zero(); r.len() - dn];
        for k in (0..q.len()).rev() {
            let c = r[k + dn].clone() / lead.clone();
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - c.clone() * dj.clone();
            }
            r[k + dn] = S::zero();
            q[k] = c;
        }
        r.truncate(dn);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor (exact backends).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_f64(&self) -> RealPolynomial<f64> {
        RealPolynomial::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.to_f64().abs()))
    }

    /// Reverses the coefficient order of a polynomial regarded as having
    /// degree `n`: `tⁿ p(1/t)`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut c: Vec<S> = (0..=n).map(|k| self.coeff(k)).collect();
        c.reverse();
        Self::new(c)
    }
}

impl RealPolynomial<f64> {
    /// Drops leading coefficients below `tol` relative to the largest one.
    pub fn trimmed(&self, tol: f64) -> Self {
        let m = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|v| v.abs() <= tol * m) {
            c.pop();
        }
        Self::new(c)
    }
}

impl<S: Scalar> Add for &RealPolynomial<S> {
    type Output = RealPolynomial<S>;
    fn add(self, o: &RealPolynomial<S>) -> RealPolynomial<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for &RealPolynomial<S> {
    type Output = RealPolynomial<S>;
    fn sub(self, o: &RealPolynomial<S>) -> RealPolynomial<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<S: Scalar> Neg for &RealPolynomial<S> {
    type Output = RealPolynomial<S>;
    fn neg(self) -> RealPolynomial<S> {
        RealPolynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Mul for &RealPolynomial<S> {
    type Output = RealPolynomial<S>;
    fn mul(self, o: &RealPolynomial<S>) -> RealPolynomial<S> {
        if self.is_zero() || o.is_zero() {
            return RealPolynomial::zero();
        }
        let mut c = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        RealPolynomial::new(c)
    }
}
