use super::quaternion::{Point3, Vec3};
use super::scalar::{Scalar, DEFAULT_TOL};
use crate::Error;

/// Line in Plücker coordinates: direction `g` and moment `m = q × g` for any
/// point `q` on the line. Float lines are kept with unit direction.
#[derive(Clone, Debug, PartialEq)]
pub struct PluckerLine<S> {
    pub dir: Vec3<S>,
    pub moment: Vec3<S>,
}

impl<S: Scalar> PluckerLine<S> {
    pub fn new(dir: Vec3<S>, moment: Vec3<S>) -> Result<Self, Error> {
        Self::new_tol(dir, moment, DEFAULT_TOL)
    }

    /// Validates `g ≠ 0` and `g·m = 0` (relative to `|g| |m|` in float mode).
    pub fn new_tol(dir: Vec3<S>, moment: Vec3<S>, tol: f64) -> Result<Self, Error> {
        if dir.is_exact_zero() {
            return Err(Error::PlueckerViolation { value: f64::NAN });
        }
        let pl = dir.dot(&moment);
        if S::EXACT {
            if !pl.is_exact_zero() {
                return Err(Error::PlueckerViolation { value: pl.to_f64() });
            }
            return Ok(Self { dir, moment });
        }
        let gn = dir.norm_sq().to_f64().sqrt();
        let mn = moment.norm_sq().to_f64().sqrt();
        if !(gn > 0.0) || pl.to_f64().abs() > tol * (gn * mn).max(1.0) {
            return Err(Error::PlueckerViolation { value: pl.to_f64() });
        }
        let inv = S::from_f64(1.0 / gn).ok_or(Error::PlueckerViolation { value: f64::NAN })?;
        Ok(Self { dir: dir.scale(&inv), moment: moment.scale(&inv) })
    }

    /// Line through `p` and `q`: `g = q − p`, `m = p × g`.
    pub fn from_two_points(p: &Point3<S>, q: &Point3<S>) -> Result<Self, Error> {
        let g = q.clone() - p.clone();
        let degenerate = if S::EXACT {
            g.is_exact_zero()
        } else {
            let scale = p.norm_sq().to_f64().max(q.norm_sq().to_f64()).max(1.0);
            g.norm_sq().to_f64() <= DEFAULT_TOL * DEFAULT_TOL * scale
        };
        if degenerate {
            return Err(Error::CoincidentPoints);
        }
        let m = p.cross(&g);
        Self::new(g, m)
    }

    /// Reciprocal product `g0·m1 + m0·g1`; zero iff the lines are coplanar.
    pub fn intersection_condition(&self, o: &Self) -> S {
        self.dir.dot(&o.moment) + self.moment.dot(&o.dir)
    }

    /// Point of the line closest to the origin, `g × m / |g|²`.
    pub fn point_nearest_origin(&self) -> Point3<S> {
        self.dir.cross(&self.moment).scale(&(S::one() / self.dir.norm_sq()))
    }

    pub fn to_f64(&self) -> PluckerLine<f64> {
        let dir = self.dir.to_f64();
        let n = dir.norm();
        PluckerLine { dir: dir.scale(&(1.0 / n)), moment: self.moment.to_f64().scale(&(1.0 / n)) }
    }
}

impl PluckerLine<f64> {
    /// Point at signed distance `s` from [`Self::point_nearest_origin`].
    pub fn point_at(&self, s: f64) -> Point3<f64> {
        self.point_nearest_origin() + self.dir.scale(&s)
    }

    /// Signed parameter of the orthogonal projection of `p`.
    pub fn param_of(&self, p: &Point3<f64>) -> f64 {
        (p.clone() - self.point_nearest_origin()).dot(&self.dir)
    }

    /// Parameters `(s, u)` of the closest points on `self` and `o`.
    /// `None` when the directions are parallel within `tol`.
    pub fn closest_params(&self, o: &Self, tol: f64) -> Option<(f64, f64)> {
        let p0 = self.point_nearest_origin();
        let p1 = o.point_nearest_origin();
        let c = self.dir.dot(&o.dir);
        let den = 1.0 - c * c;
        if den <= tol {
            return None;
        }
        let w = p0 - p1;
        let d0 = self.dir.dot(&w);
        let d1 = o.dir.dot(&w);
        let s = (c * d1 - d0) / den;
        let u = (d1 - c * d0) / den;
        Some((s, u))
    }

    pub fn closest_points(&self, o: &Self, tol: f64) -> Option<(Point3<f64>, Point3<f64>)> {
        let (s, u) = self.closest_params(o, tol)?;
        Some((self.point_at(s), o.point_at(u)))
    }

    /// Euclidean distance between the two lines.
    pub fn distance(&self, o: &Self) -> f64 {
        let cross = self.dir.cross(&o.dir);
        let cn = cross.norm();
        if cn < 1e-12 {
            let w = o.point_nearest_origin() - self.point_nearest_origin();
            return w.cross(&self.dir).norm();
        }
        self.intersection_condition(o).abs() / cn
    }

    /// Projective equality up to orientation.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        let same =
            (self.dir.clone() - o.dir.clone()).norm() <= tol && (self.moment.clone() - o.moment.clone()).norm() <= tol;
        let flipped =
            (self.dir.clone() + o.dir.clone()).norm() <= tol && (self.moment.clone() + o.moment.clone()).norm() <= tol;
        same || flipped
    }
}
