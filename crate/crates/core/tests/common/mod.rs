#![allow(dead_code)]

pub mod oracle;

use nalgebra::{Isometry3, Matrix4, Rotation3, Translation3, Unit, Vector3};
use proptest::prelude::*;
use ratlink::motionpoly::LinearFactor;
use ratlink::quatcore::{DualQuaternion, Quaternion, Vec3};

pub fn vec3(r: f64) -> impl Strategy<Value = Vec3<f64>> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

pub fn unit_vec3() -> impl Strategy<Value = Vec3<f64>> {
    vec3(1.0).prop_filter("nonzero", |v| v.norm() > 1e-3).prop_map(|v| v.normalized())
}

pub fn dual_quaternion() -> impl Strategy<Value = DualQuaternion<f64>> {
    prop::array::uniform8(-2.0..2.0f64).prop_map(DualQuaternion::from_array)
}

/// Random rigid displacement with a random projective scale.
pub fn pose() -> impl Strategy<Value = DualQuaternion<f64>> {
    (unit_vec3(), -3.0..3.0f64, vec3(5.0), prop_oneof![-3.0..-0.2f64, 0.2..3.0f64])
        .prop_map(|(axis, angle, t, s)| DualQuaternion::from_rotation_translation(&axis, angle, &t).scale(&s))
}

/// Rotation about a random line: `p · (w + k) · p⁻¹`.
pub fn revolute_h() -> impl Strategy<Value = DualQuaternion<f64>> {
    (pose(), -2.0..2.0f64).prop_map(|(p, w)| {
        let hz = DualQuaternion::new(Quaternion::new(w, 0.0, 0.0, 1.0), Quaternion::zero());
        &(&p * &hz) * &p.inverse().unwrap()
    })
}

/// Homogeneous 4×4 matrix of a Study-parameter pose, built from the rotation
/// matrix of the normalized primal quaternion and the translation
/// `−2 vec(b a*) / |a|²`.
pub fn pose_matrix(p: &DualQuaternion<f64>) -> nalgebra::Matrix4<f64> {
    let a = &p.primal;
    let n = a.norm_sq();
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(a.w, a.x, a.y, a.z));
    let ba = &p.dual * &a.conj();
    let t = nalgebra::Vector3::new(ba.x, ba.y, ba.z) * (-2.0 / n);
    nalgebra::Isometry3::from_parts(nalgebra::Translation3::from(t), q).to_homogeneous()
}

pub fn apply_matrix(m: &nalgebra::Matrix4<f64>, q: &Vec3<f64>) -> Vec3<f64> {
    let v = m * nalgebra::Vector4::new(q.x, q.y, q.z, 1.0);
    Vec3::new(v.x, v.y, v.z)
}

/// Rotation of `t − h` as a rigid transform about its axis line, built
/// from the axis direction, a point on the axis and the half-angle
/// `atan2(‖vec a‖, t − a₀)`; the quaternion `(t − a₀) − vec a` turns by
/// that angle about `−vec a`, so about the axis direction it is negative.
pub fn factor_matrix(f: &LinearFactor, t: f64) -> Matrix4<f64> {
    let hv = f.h.primal.vector();
    let phi = 2.0 * hv.norm().atan2(t - f.h.primal.w);
    let d = &f.axis.dir;
    let p = f.axis.point_nearest_origin();
    let p = Vector3::new(p.x, p.y, p.z);
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(d.x, d.y, d.z)), -phi);
    let iso =
        Translation3::from(p) * Isometry3::from_parts(Translation3::identity(), r.into()) * Translation3::from(-p);
    iso.to_homogeneous()
}

pub fn chain_matrix(factors: &[LinearFactor], t: f64) -> Matrix4<f64> {
    factors.iter().fold(Matrix4::identity(), |acc, f| acc * factor_matrix(f, t))
}
