use std::ops::{Add, Mul, Neg, Sub};

use super::line::PluckerLine;
use super::quaternion::{Point3, Quaternion, Vec3};
use super::scalar::{Scalar, DEFAULT_TOL};
use crate::Error;

/// Dual quaternion `a + ε b` with `ε² = 0`, stored as Study parameters
/// `(p0, .., p7)` where `a = (p0..p3)` and `b = (p4..p7)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualQuaternion<S> {
    pub primal: Quaternion<S>,
    pub dual: Quaternion<S>,
}

impl<S: Scalar> DualQuaternion<S> {
    pub fn new(primal: Quaternion<S>, dual: Quaternion<S>) -> Self {
        Self { primal, dual }
    }

    pub fn zero() -> Self {
        Self::new(Quaternion::zero(), Quaternion::zero())
    }

    pub fn identity() -> Self {
        Self::new(Quaternion::one(), Quaternion::zero())
    }

    /// Real scalar `s` embedded as `s + 0 ε`.
    pub fn real(s: S) -> Self {
        Self::new(Quaternion::real(s), Quaternion::zero())
    }

    /// The pure dual unit `ε`.
    pub fn epsilon() -> Self {
        Self::new(Quaternion::zero(), Quaternion::one())
    }

    pub fn from_array([p0, p1, p2, p3, p4, p5, p6, p7]: [S; 8]) -> Self {
        Self::new(Quaternion::new(p0, p1, p2, p3), Quaternion::new(p4, p5, p6, p7))
    }

    pub fn from_i64s(c: [i64; 8]) -> Self {
        Self::from_array(c.map(S::from_i64))
    }

    pub fn to_array(&self) -> [S; 8] {
        let [a0, a1, a2, a3] = self.primal.to_array();
        let [b0, b1, b2, b3] = self.dual.to_array();
        [a0, a1, a2, a3, b0, b1, b2, b3]
    }

    /// Conjugate `p* = a* + ε b*`.
    pub fn conj(&self) -> Self {
        Self::new(self.primal.conj(), self.dual.conj())
    }

    /// `p_ε = a − ε b`.
    pub fn eps_conj(&self) -> Self {
        Self::new(self.primal.clone(), -self.dual.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.primal.scale(s), self.dual.scale(s))
    }

    /// Study quadric form `a·b = p0 p4 + p1 p5 + p2 p6 + p3 p7`.
    pub fn study_condition(&self) -> S {
        self.primal.dot(&self.dual)
    }

    /// Symmetric bilinear form polar to [`Self::study_condition`]:
    /// `B(p, q) = a_p·b_q + b_p·a_q`, so that `B(p, p) = 2 a·b`.
    pub fn study_bilinear(&self, o: &Self) -> S {
        self.primal.dot(&o.dual) + self.dual.dot(&o.primal)
    }

    /// `p p*` as a dual number `(a a*, a b* + b a*)` (both real for any `p`).
    pub fn norm(&self) -> (S, S) {
        let two = S::from_i64(2);
        (self.primal.norm_sq(), two * self.study_condition())
    }

    /// Inverse `a⁻¹ − ε a⁻¹ b a⁻¹`, `None` when the primal part vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let ai = self.primal.inverse()?;
        let d = -(&(&ai * &self.dual) * &ai);
        Some(Self::new(ai, d))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.primal.is_exact_zero() && self.dual.is_exact_zero()
    }

    /// Sum of squares of all eight coordinates.
    pub fn coord_norm_sq(&self) -> S {
        self.primal.norm_sq() + self.dual.norm_sq()
    }

    pub fn to_f64(&self) -> DualQuaternion<f64> {
        DualQuaternion::new(self.primal.to_f64(), self.dual.to_f64())
    }

    /// Point embedding `(1, 0, 0, 0, 0, qx, qy, qz)`.
    pub fn embed_point(q: &Point3<S>) -> Self {
        Self::new(Quaternion::one(), Quaternion::pure(q))
    }

    /// Line embedding `(0, g0, g1, g2, 0, g3, g4, g5)`.
    pub fn embed_line(l: &PluckerLine<S>) -> Self {
        Self::new(Quaternion::pure(&l.dir), Quaternion::pure(&l.moment))
    }

    /// Inverse of [`Self::embed_point`] after projective normalization.
    pub fn extract_point(&self) -> Result<Point3<S>, Error> {
        let w = self.primal.w.clone();
        if w.is_exact_zero() {
            return Err(Error::DegeneratePose);
        }
        Ok(self.dual.vector().scale(&(S::one() / w)))
    }

    /// Squared primal norm used as the common denominator of both actions.
    fn action_denominator(&self, tol: f64) -> Result<S, Error> {
        let n = self.primal.norm_sq();
        let degenerate = if S::EXACT {
            n.is_exact_zero()
        } else {
            let total = self.coord_norm_sq().to_f64();
            n.to_f64() <= tol * total || total == 0.0
        };
        if degenerate {
            Err(Error::DegeneratePose)
        } else {
            Ok(n)
        }
    }

    /// Point action `q ↦ p_ε q p* / (p p*)`.
    pub fn act_on_point(&self, q: &Point3<S>) -> Result<Point3<S>, Error> {
        self.act_on_point_tol(q, DEFAULT_TOL)
    }

    pub fn act_on_point_tol(&self, q: &Point3<S>, tol: f64) -> Result<Point3<S>, Error> {
        self.action_denominator(tol)?;
        let image = &(&self.eps_conj() * &Self::embed_point(q)) * &self.conj();
        image.extract_point()
    }

    /// Line action `l ↦ p_ε l p_ε* / (p p*)`.
    pub fn act_on_line(&self, l: &PluckerLine<S>) -> Result<PluckerLine<S>, Error> {
        self.act_on_line_tol(l, DEFAULT_TOL)
    }

    pub fn act_on_line_tol(&self, l: &PluckerLine<S>, tol: f64) -> Result<PluckerLine<S>, Error> {
        let n = self.action_denominator(tol)?;
        let pe = self.eps_conj();
        let image = &(&pe * &Self::embed_line(l)) * &pe.conj();
        let inv = S::one() / n;
        PluckerLine::new_tol(image.primal.vector().scale(&inv), image.dual.vector().scale(&inv), tol)
    }
}

impl DualQuaternion<f64> {
    /// Rigid displacement rotating by `angle` about the unit `axis` through the
    /// origin, followed by the translation `t`.
    pub fn from_rotation_translation(axis: &Vec3<f64>, angle: f64, t: &Vec3<f64>) -> Self {
        let u = axis.normalized();
        let (s, c) = (angle / 2.0).sin_cos();
        let a = Quaternion::new(c, s * u.x, s * u.y, s * u.z);
        let b = (&Quaternion::pure(t) * &a).scale(&-0.5);
        Self::new(a, b)
    }

    pub fn from_translation(t: &Vec3<f64>) -> Self {
        Self::from_rotation_translation(&Vec3::new(0.0, 0.0, 1.0), 0.0, t)
    }

    /// Representative with unit primal part and positive leading nonzero
    /// primal coordinate. Used for display and serialization only.
    pub fn normalized(&self) -> Self {
        let n = self.primal.norm_sq().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        let lead = self.primal.to_array().into_iter().find(|v| v.abs() > 1e-14 * n).unwrap_or(1.0);
        let s = if lead < 0.0 { -1.0 / n } else { 1.0 / n };
        self.scale(&s)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<S: Scalar> Add for DualQuaternion<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.primal + o.primal, self.dual + o.dual)
    }
}

impl<S: Scalar> Sub for DualQuaternion<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.primal - o.primal, self.dual - o.dual)
    }
}

impl<S: Scalar> Neg for DualQuaternion<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.primal, -self.dual)
    }
}

impl<S: Scalar> Mul for &DualQuaternion<S> {
    type Output = DualQuaternion<S>;
    /// `(a + ε b)(c + ε d) = ac + ε(ad + bc)`.
    fn mul(self, o: &DualQuaternion<S>) -> DualQuaternion<S> {
        DualQuaternion::new(&self.primal * &o.primal, &self.primal * &o.dual + &self.dual * &o.primal)
    }
}

impl<S: Scalar> Mul for DualQuaternion<S> {
    type Output = DualQuaternion<S>;
    fn mul(self, o: DualQuaternion<S>) -> DualQuaternion<S> {
        &self * &o
    }
}

/// A rigid displacement: a dual quaternion on the Study quadric with
/// nonzero primal part. Interpreted projectively.
#[derive(Clone, Debug, PartialEq)]
pub struct Pose<S>(DualQuaternion<S>);

impl<S: Scalar> Pose<S> {
    pub fn new(dq: DualQuaternion<S>) -> Result<Self, Error> {
        Self::new_tol(dq, DEFAULT_TOL)
    }

    /// Validates the Study condition relative to the coordinate scale.
    pub fn new_tol(dq: DualQuaternion<S>, tol: f64) -> Result<Self, Error> {
        if dq.is_exact_zero() {
            return Err(Error::DegeneratePose);
        }
        let study = dq.study_condition();
        let scale = dq.coord_norm_sq().to_f64();
        if !study.near_zero(tol * scale.max(1.0)) {
            return Err(Error::StudyViolation { value: study.to_f64() });
        }
        if dq.primal.norm_sq().near_zero(tol * tol * scale) {
            return Err(Error::DegeneratePose);
        }
        Ok(Self(dq))
    }

    pub fn identity() -> Self {
        Self(DualQuaternion::identity())
    }

    pub fn dq(&self) -> &DualQuaternion<S> {
        &self.0
    }

    pub fn into_inner(self) -> DualQuaternion<S> {
        self.0
    }

    pub fn study_condition(&self) -> S {
        self.0.study_condition()
    }

    pub fn act_on_point(&self, q: &Point3<S>) -> Result<Point3<S>, Error> {
        self.0.act_on_point(q)
    }

    pub fn act_on_line(&self, l: &PluckerLine<S>) -> Result<PluckerLine<S>, Error> {
        self.0.act_on_line(l)
    }
}
