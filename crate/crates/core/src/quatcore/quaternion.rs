use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;

/// Three-component vector; also used as a Euclidean point.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

/// A point of Euclidean three-space.
pub type Point3<S> = Vec3<S>;

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    pub fn from_array([x, y, z]: [S; 3]) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(&self) -> [S; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone() + self.z.clone() * o.z.clone()
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y.clone() * o.z.clone() - self.z.clone() * o.y.clone(),
            self.z.clone() * o.x.clone() - self.x.clone() * o.z.clone(),
            self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone(),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.x.clone() * s.clone(), self.y.clone() * s.clone(), self.z.clone() * s.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.x.is_exact_zero() && self.y.is_exact_zero() && self.z.is_exact_zero()
    }

    pub fn to_f64(&self) -> Vec3<f64> {
        Vec3::new(self.x.to_f64(), self.y.to_f64(), self.z.to_f64())
    }
}

impl Vec3<f64> {
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(&(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Quaternion `w + x i + y j + z k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quaternion<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quaternion<S> {
    pub fn new(w: S, x: S, y: S, z: S) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn one() -> Self {
        Self::new(S::one(), S::zero(), S::zero(), S::zero())
    }

    pub fn real(w: S) -> Self {
        Self::new(w, S::zero(), S::zero(), S::zero())
    }

    pub fn pure(v: &Vec3<S>) -> Self {
        Self::new(S::zero(), v.x.clone(), v.y.clone(), v.z.clone())
    }

    pub fn from_array([w, x, y, z]: [S; 4]) -> Self {
        Self { w, x, y, z }
    }

    pub fn to_array(&self) -> [S; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn vector(&self) -> Vec3<S> {
        Vec3::new(self.x.clone(), self.y.clone(), self.z.clone())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    /// Euclidean inner product of the coefficient 4-vectors.
    pub fn dot(&self, o: &Self) -> S {
        self.w.clone() * o.w.clone()
            + self.x.clone() * o.x.clone()
            + self.y.clone() * o.y.clone()
            + self.z.clone() * o.z.clone()
    }

    /// `q q*`, a non-negative real number.
    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(
            self.w.clone() * s.clone(),
            self.x.clone() * s.clone(),
            self.y.clone() * s.clone(),
            self.z.clone() * s.clone(),
        )
    }

    /// Multiplicative inverse, `None` for the zero quaternion.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_exact_zero() {
            return None;
        }
        Some(self.conj().scale(&(S::one() / n)))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.w.is_exact_zero() && self.x.is_exact_zero() && self.y.is_exact_zero() && self.z.is_exact_zero()
    }

    pub fn to_f64(&self) -> Quaternion<f64> {
        Quaternion::new(self.w.to_f64(), self.x.to_f64(), self.y.to_f64(), self.z.to_f64())
    }
}

impl<S: Scalar> Add for Quaternion<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> Sub for Quaternion<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> Neg for Quaternion<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<S: Scalar> Mul for &Quaternion<S> {
    type Output = Quaternion<S>;
    fn mul(self, o: &Quaternion<S>) -> Quaternion<S> {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&o.w, &o.x, &o.y, &o.z);
        Quaternion::new(
            a1.clone() * a2.clone() - b1.clone() * b2.clone() - c1.clone() * c2.clone() - d1.clone() * d2.clone(),
            a1.clone() * b2.clone() + b1.clone() * a2.clone() + c1.clone() * d2.clone() - d1.clone() * c2.clone(),
            a1.clone() * c2.clone() - b1.clone() * d2.clone() + c1.clone() * a2.clone() + d1.clone() * b2.clone(),
            a1.clone() * d2.clone() + b1.clone() * c2.clone() - c1.clone() * b2.clone() + d1.clone() * a2.clone(),
        )
    }
}

impl<S: Scalar> Mul for Quaternion<S> {
    type Output = Quaternion<S>;
    fn mul(self, o: Quaternion<S>) -> Quaternion<S> {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamilton_rules() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -k.clone());
        assert_eq!(&k * &k, Quaternion::real(-1.0));
    }

    #[test]
    fn norm_is_multiplicative() {
        let p = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let q = Quaternion::new(-0.3, 0.7, 2.0, -1.0);
        let lhs = (&p * &q).norm_sq();
        let rhs = p.norm_sq() * q.norm_sq();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Quaternion::<f64>::zero().inverse().is_none());
    }
}
