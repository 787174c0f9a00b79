//! Rational motion interpolation of two to four poses.
//!
//! The first pose is moved to the identity and assigned the parameter
//! `t = ∞`, so it is the leading coefficient of the curve. The remaining
//! poses receive finite node parameters computed by the solver.
//!
//! * two poses: the linear motion `t + p₁` (requires a pure rotation);
//! * three poses: the unique quadratic motion through them;
//! * four poses: cubic motions built from a line `k` in the span of the
//!   poses, `k = p₀ + Σ xᵢ pᵢ` with vanishing scalar parts and
//!   `B(k, k) = 0`; each node is `tᵢ = B(k, pᵢ) / pᵢ[4]`.
//!
//! Among several admissible cubics the one whose node vector has the
//! smallest Euclidean norm is returned (ties: lexicographic order).

use crate::motionpoly::{projective_residual, real_roots, MotionPolynomial};
use crate::quatcore::{DualQuaternion, Pose, Scalar, Vec3, DEFAULT_TOL};
use crate::{Error, Result};

/// Curve parameter of an interpolation node.
#[derive(Clone, Debug, PartialEq)]
pub enum NodeParam<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> NodeParam<S> {
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            NodeParam::Finite(t) => Some(t.to_f64()),
            NodeParam::Infinity => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationResult<S> {
    pub curve: MotionPolynomial<S>,
    pub node_params: Vec<NodeParam<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationReport {
    /// Projective residual at each node.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest coefficient of the dual part of `C C*`, relative to `ν`.
    pub study_residual: f64,
}

/// Residual below which a node counts as interpolated.
pub const INTERPOLATION_TOL: f64 = 1e-8;

/// Study bilinear form.
fn b<S: Scalar>(p: &DualQuaternion<S>, q: &DualQuaternion<S>) -> S {
    p.study_bilinear(q)
}

fn coord<S: Scalar>(p: &DualQuaternion<S>, i: usize) -> S {
    p.to_array()[i].clone()
}

/// Interpolates 2 to 4 poses (Study parameters, projective).
pub fn interpolate_poses<S: Scalar>(poses: &[DualQuaternion<S>]) -> Result<InterpolationResult<S>> {
    Ok(interpolation_candidates(poses)?.remove(0))
}

/// Every admissible interpolant, preferred one first. Four poses may admit
/// two cubics of the constructed family.
pub fn interpolation_candidates<S: Scalar>(poses: &[DualQuaternion<S>]) -> Result<Vec<InterpolationResult<S>>> {
    if !(2..=4).contains(&poses.len()) {
        return Err(Error::InvalidInput(format!("expected 2 to 4 poses, got {}", poses.len())));
    }
    for p in poses {
        Pose::new(p.clone())?;
    }
    let p0 = poses[0].clone();
    let p0_inv = p0.inverse().ok_or(Error::DegeneratePose)?;
    let rel: Vec<DualQuaternion<S>> = poses[1..].iter().map(|p| &p0_inv * p).collect();
    check_configuration(&rel)?;

    let candidates = match rel.len() {
        1 => vec![linear(&rel[0])?],
        2 => vec![quadratic(&rel)?],
        _ => cubic(&rel)?,
    };
    let mut admissible: Vec<(f64, Vec<f64>, InterpolationResult<S>)> = Vec::new();
    let mut last_err = Error::NoCubicInterpolant;
    for (curve, nodes) in candidates {
        let curve = curve.left_mul(&p0);
        let mut node_params = vec![NodeParam::Infinity];
        node_params.extend(nodes.iter().cloned().map(NodeParam::Finite));
        let result = InterpolationResult { curve, node_params };
        match admissible_check(&result, poses) {
            Ok(()) => {
                let key: Vec<f64> = nodes.iter().map(Scalar::to_f64).collect();
                let norm = key.iter().map(|v| v * v).sum::<f64>();
                admissible.push((norm, key, result));
            }
            Err(e) => last_err = e,
        }
    }
    admissible.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| {
            a.1.iter().zip(&b.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    if admissible.is_empty() {
        return Err(last_err);
    }
    Ok(admissible.into_iter().map(|(_, _, r)| r).collect())
}

fn admissible_check<S: Scalar>(r: &InterpolationResult<S>, poses: &[DualQuaternion<S>]) -> Result<()> {
    let report = verify_interpolation(r, poses);
    if report.max_residual >= INTERPOLATION_TOL || report.study_residual >= 1e-9 {
        return Err(Error::DegenerateConfiguration("interpolant misses a pose".into()));
    }
    let nu = r.curve.to_f64().norm_polynomial_tol(1e-9)?;
    if !real_roots(&nu).is_empty() {
        return Err(Error::NoCubicInterpolant);
    }
    Ok(())
}

/// Rejects pure translations, planar and spherical configurations. Poses
/// are given relative to the first one.
fn check_configuration<S: Scalar>(rel: &[DualQuaternion<S>]) -> Result<()> {
    let fl: Vec<DualQuaternion<f64>> = rel.iter().map(|p| p.to_f64()).collect();
    for (i, p) in fl.iter().enumerate() {
        let v = p.primal.vector();
        if v.norm() <= 1e-9 * p.primal.norm_sq().sqrt() {
            return Err(Error::DegenerateConfiguration(format!("pose {} is a pure translation of pose 0", i + 1)));
        }
    }
    if fl.len() < 2 {
        return Ok(());
    }
    let dirs: Vec<Vec3<f64>> = fl.iter().map(|p| p.primal.vector().normalized()).collect();
    if dirs.iter().all(|d| d.cross(&dirs[0]).norm() <= 1e-9) {
        return Err(Error::DegenerateConfiguration("rotation axes are parallel (planar motion)".into()));
    }
    if common_fixed_point(&fl) {
        return Err(Error::DegenerateConfiguration("poses share a fixed point (spherical motion)".into()));
    }
    Ok(())
}

fn common_fixed_point(rel: &[DualQuaternion<f64>]) -> bool {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut scale = 1.0f64;
    for p in rel {
        let Ok(d) = p.act_on_point(&Vec3::zero()) else { return false };
        scale = scale.max(d.norm());
        let cols: Vec<Vec3<f64>> = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)]
            .iter()
            .map(|e| p.act_on_point(e).map(|x| x - d.clone() - e.clone()))
            .collect::<Result<_>>()
            .unwrap_or_default();
        if cols.len() != 3 {
            return false;
        }
        for (k, dk) in d.to_array().iter().enumerate() {
            rows.push([cols[0].to_array()[k], cols[1].to_array()[k], cols[2].to_array()[k]]);
            rhs.push(-dk);
        }
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let y = nalgebra::DVector::from_vec(rhs);
    let svd = a.clone().svd(true, true);
    let Ok(x) = svd.solve(&y, 1e-12) else { return false };
    (&a * &x - &y).norm() <= 1e-9 * scale
}

/// `t + p₁`, valid when `p₁` is a pure rotation (`B(1, p₁) = p₁[4] = 0`).
fn linear<S: Scalar>(p1: &DualQuaternion<S>) -> Result<(MotionPolynomial<S>, Vec<S>)> {
    let scale = p1.coord_norm_sq().to_f64().sqrt();
    if !coord(p1, 4).near_zero(DEFAULT_TOL * scale) {
        return Err(Error::NoCubicInterpolant);
    }
    let curve = MotionPolynomial::new(vec![p1.clone(), DualQuaternion::identity()]);
    Ok((curve, vec![S::zero()]))
}

/// Quadratic with nodes `0` and `1`:
/// `C = t(t − 1) + c₁ p₁ (t − 1) + c₂ p₂ t`.
fn quadratic<S: Scalar>(p: &[DualQuaternion<S>]) -> Result<(MotionPolynomial<S>, Vec<S>)> {
    let one = DualQuaternion::identity();
    let b01 = b(&one, &p[0]);
    let b02 = b(&one, &p[1]);
    let b12 = b(&p[0], &p[1]);
    let scale = (p[0].coord_norm_sq().to_f64() * p[1].coord_norm_sq().to_f64()).sqrt();
    if b12.near_zero(DEFAULT_TOL * scale) || b01.near_zero(DEFAULT_TOL * scale) || b02.near_zero(DEFAULT_TOL * scale) {
        return Err(Error::DegenerateConfiguration("poses admit no quadratic interpolant".into()));
    }
    let c1 = -(b02 / b12.clone());
    let c2 = b01 / b12;
    let coeffs = vec![-(p[0].scale(&c1)), p[0].scale(&c1) + p[1].scale(&c2) - one.clone(), one];
    Ok((MotionPolynomial::new(coeffs), vec![S::zero(), S::one()]))
}

/// Solves `A x = y` for a 2×3 system: a particular solution and a null vector.
fn solve_2x3<S: Scalar>(a: [[S; 3]; 2], y: [S; 2]) -> Option<([S; 3], [S; 3])> {
    let r0 = Vec3::from_array(a[0].clone());
    let r1 = Vec3::from_array(a[1].clone());
    let n = r0.cross(&r1);
    let nn = n.norm_sq();
    if nn.is_exact_zero() || (!S::EXACT && nn.to_f64() <= 1e-20 * (r0.norm_sq() * r1.norm_sq()).to_f64()) {
        return None;
    }
    // minimum-norm solution: x = (y0 (r1 × n) + y1 (n × r0)) / |n|²
    let x = r1.cross(&n).scale(&y[0]) + n.cross(&r0).scale(&y[1]);
    let x = x.scale(&(S::one() / nn));
    Some((x.to_array(), n.to_array()))
}

fn cubic<S: Scalar>(p: &[DualQuaternion<S>]) -> Result<Vec<(MotionPolynomial<S>, Vec<S>)>> {
    let one = DualQuaternion::<S>::identity();
    let a = [[coord(&p[0], 0), coord(&p[1], 0), coord(&p[2], 0)], [coord(&p[0], 4), coord(&p[1], 4), coord(&p[2], 4)]];
    let (xp, nv) = solve_2x3(a, [-S::one(), S::zero()])
        .ok_or_else(|| Error::DegenerateConfiguration("poses are linearly dependent".into()))?;
    let kp = (0..3).fold(one.clone(), |acc, i| acc + p[i].scale(&xp[i]));
    let kn = (0..3).fold(DualQuaternion::zero(), |acc, i| acc + p[i].scale(&nv[i]));
    let qa = b(&kn, &kn);
    let qb = b(&kp, &kn) * S::from_i64(2);
    let qc = b(&kp, &kp);
    let scale = kp.coord_norm_sq().to_f64().max(kn.coord_norm_sq().to_f64()).max(1.0);
    let mut params: Vec<S> = Vec::new();
    if qa.near_zero(1e-12 * scale) {
        if qb.near_zero(1e-12 * scale) {
            return Err(Error::NoCubicInterpolant);
        }
        params.push(-(qc / qb));
    } else {
        let disc = qb.clone() * qb.clone() - S::from_i64(4) * qa.clone() * qc;
        if disc < S::zero() && !disc.near_zero(1e-12 * scale * scale) {
            return Err(Error::NoCubicInterpolant);
        }
        let disc = if disc < S::zero() { S::zero() } else { disc };
        let root = disc.sqrt_checked().ok_or(Error::IrrationalInterpolant)?;
        let two_a = S::from_i64(2) * qa;
        params.push((-qb.clone() - root.clone()) / two_a.clone());
        if !root.is_exact_zero() {
            params.push((-qb + root) / two_a);
        }
    }
    let mut out = Vec::new();
    for s in params {
        let x: Vec<S> = (0..3).map(|i| xp[i].clone() + s.clone() * nv[i].clone()).collect();
        let k = (0..3).fold(one.clone(), |acc, i| acc + p[i].scale(&x[i]));
        if let Some(c) = cubic_from_line(p, &k, &x) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateConfiguration("poses admit no cubic interpolant of this family".into()));
    }
    Ok(out)
}

/// `C = ∏(t − tⱼ) + Σ μᵢ pᵢ ∏_{j≠i}(t − tⱼ)` with `μᵢ = ν xᵢ / ∏_{j≠i}(−tⱼ)`
/// and `ν = −t₁ t₂ t₃`.
fn cubic_from_line<S: Scalar>(
    p: &[DualQuaternion<S>],
    k: &DualQuaternion<S>,
    x: &[S],
) -> Option<(MotionPolynomial<S>, Vec<S>)> {
    let mut ts = Vec::with_capacity(3);
    for pi in p {
        let d = coord(pi, 4);
        if d.near_zero(DEFAULT_TOL * pi.coord_norm_sq().to_f64().sqrt()) {
            return None;
        }
        ts.push(b(k, pi) / d);
    }
    for i in 0..3 {
        for j in 0..i {
            if (ts[i].clone() - ts[j].clone()).near_zero(DEFAULT_TOL * (1.0 + ts[i].to_f64().abs())) {
                return None;
            }
        }
        if ts[i].near_zero(DEFAULT_TOL) {
            return None;
        }
    }
    let nu = -(ts[0].clone() * ts[1].clone() * ts[2].clone());
    let lin = |r: &S| MotionPolynomial::new(vec![DualQuaternion::real(-r.clone()), DualQuaternion::identity()]);
    let mut curve = (0..3).fold(MotionPolynomial::constant(DualQuaternion::identity()), |acc, j| &acc * &lin(&ts[j]));
    for i in 0..3 {
        let others: Vec<&S> = (0..3).filter(|&j| j != i).map(|j| &ts[j]).collect();
        let denom = others.iter().fold(S::one(), |acc, o| acc * -(*o).clone());
        let mu = nu.clone() * x[i].clone() / denom;
        let basis = others.iter().fold(MotionPolynomial::constant(p[i].scale(&mu)), |acc, o| &acc * &lin(o));
        curve = &curve + &basis;
    }
    Some((curve, ts))
}

fn proportional<S: Scalar>(a: &[S; 8], b: &[S; 8]) -> bool {
    !a.iter().all(Scalar::is_exact_zero)
        && (0..8).all(|i| (0..i).all(|j| a[i].clone() * b[j].clone() == a[j].clone() * b[i].clone()))
}

/// Projective residuals of the curve at its nodes and of the Study identity.
pub fn verify_interpolation<S: Scalar>(r: &InterpolationResult<S>, poses: &[DualQuaternion<S>]) -> InterpolationReport {
    let curve = r.curve.to_f64();
    let residuals: Vec<f64> = r
        .node_params
        .iter()
        .zip(poses)
        .map(|(node, pose)| {
            let value = match node {
                NodeParam::Finite(t) => r.curve.evaluate(t),
                NodeParam::Infinity => r.curve.leading(),
            };
            if S::EXACT && proportional(&value.to_array(), &pose.to_array()) {
                return 0.0;
            }
            projective_residual(&pose.to_f64().to_array(), &value.to_f64().to_array())
        })
        .collect();
    let prod = &curve * &curve.conj();
    let nu_scale = prod.coordinate(0).max_abs_coeff().max(f64::MIN_POSITIVE);
    let study_residual = (1..8).fold(0.0f64, |m, i| m.max(prod.coordinate(i).max_abs_coeff())) / nu_scale;
    let max_residual = residuals.iter().fold(0.0f64, |m, &v| m.max(v));
    InterpolationReport { residuals, max_residual, study_residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatcore::Rational;

    #[test]
    fn two_poses_give_a_revolute() {
        let q = std::f64::consts::FRAC_PI_4;
        let poses = vec![
            DualQuaternion::identity(),
            DualQuaternion::from_array([q.cos(), 0.0, 0.0, q.sin(), 0.0, 0.0, 0.0, 0.0]),
        ];
        let r = interpolate_poses(&poses).unwrap();
        assert_eq!(r.curve.degree(), Some(1));
        assert!(verify_interpolation(&r, &poses).max_residual < 1e-12);
    }

    #[test]
    fn screw_cannot_be_reached_by_one_joint() {
        let poses = vec![DualQuaternion::<Rational>::identity(), DualQuaternion::from_i64s([1, 0, 0, 1, -1, 0, 0, 1])];
        assert_eq!(interpolate_poses(&poses).unwrap_err(), Error::NoCubicInterpolant);
    }

    #[test]
    fn identity_curve_has_zero_residual() {
        let r = InterpolationResult {
            curve: MotionPolynomial::<f64>::constant(DualQuaternion::identity()),
            node_params: vec![NodeParam::Infinity],
        };
        let rep = verify_interpolation(&r, &[DualQuaternion::identity()]);
        assert_eq!(rep.max_residual, 0.0);
        assert_eq!(rep.study_residual, 0.0);
    }

    #[test]
    fn pure_translation_rejected() {
        let poses = vec![
            DualQuaternion::<Rational>::identity(),
            DualQuaternion::from_i64s([0, 0, 0, 1, 1, 0, 1, 0]),
            DualQuaternion::from_i64s([1, 0, 0, 0, 0, 1, 0, 0]),
        ];
        assert!(matches!(interpolate_poses(&poses), Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn wrong_pose_count() {
        let one = DualQuaternion::<f64>::identity();
        assert!(matches!(interpolate_poses(&[one.clone()]), Err(Error::InvalidInput(_))));
        assert!(matches!(interpolate_poses(&vec![one; 5]), Err(Error::InvalidInput(_))));
    }
}
