mod common;

use proptest::prelude::*;
use ratlink::fixtures::{bennett_curve, six_r_curve, six_r_poses, SIX_R_NUMERATORS};
use ratlink::interp::*;
use ratlink::motionpoly::{curve_residual, MotionPolynomial};
use ratlink::quatcore::{ratio, DualQuaternion, Rational};

#[test]
fn four_poses_exact_cubic() {
    let poses = six_r_poses::<Rational>();
    let r = interpolate_poses(&poses).unwrap();
    assert_eq!(r.curve.degree(), Some(3));
    let lead = r.curve.leading().primal.w.clone();
    let monic = r.curve.scale(&(ratio(1, 1) / lead));
    assert_eq!(monic, six_r_curve());
    assert_eq!(
        r.node_params,
        vec![
            NodeParam::Infinity,
            NodeParam::Finite(ratio(-1, 4)),
            NodeParam::Finite(ratio(1, 2)),
            NodeParam::Finite(ratio(5, 4)),
        ]
    );
    let rep = verify_interpolation(&r, &poses);
    assert_eq!(rep.max_residual, 0.0);
    assert_eq!(rep.study_residual, 0.0);
}

#[test]
fn four_poses_float_cubic() {
    let poses = six_r_poses::<f64>();
    let r = interpolate_poses(&poses).unwrap();
    let monic = r.curve.scale(&(1.0 / r.curve.leading().primal.w));
    for i in 0..8 {
        for k in 0..4 {
            let expect = SIX_R_NUMERATORS[i][k] as f64 / 128.0;
            assert!((monic.coordinate(i).coeff(k) - expect).abs() < 1e-12);
        }
    }
    assert!(verify_interpolation(&r, &poses).max_residual < 1e-12);
}

#[test]
fn three_poses_from_a_bennett_motion() {
    let c = bennett_curve::<Rational>();
    let poses: Vec<DualQuaternion<Rational>> =
        [ratio(2, 1), ratio(-1, 1), ratio(1, 3)].iter().map(|t| c.evaluate(t)).collect();
    let r = interpolate_poses(&poses).unwrap();
    assert_eq!(r.curve.degree(), Some(2));
    assert_eq!(verify_interpolation(&r, &poses).max_residual, 0.0);
}

#[test]
fn perturbed_curve_is_flagged() {
    let poses = six_r_poses::<f64>();
    let mut r = interpolate_poses(&poses).unwrap();
    let mut coeffs = r.curve.coeffs().to_vec();
    coeffs[1].dual.y += 0.5;
    r.curve = MotionPolynomial::new(coeffs);
    let rep = verify_interpolation(&r, &poses);
    assert!(rep.max_residual > 1e-3);
}

/// `C(α t + β)`.
fn reparametrize(c: &MotionPolynomial<f64>, alpha: f64, beta: f64) -> MotionPolynomial<f64> {
    let lin = MotionPolynomial::new(vec![DualQuaternion::real(beta), DualQuaternion::real(alpha)]);
    c.coeffs()
        .iter()
        .rev()
        .fold(MotionPolynomial::zero(), |acc, k| &(&acc * &lin) + &MotionPolynomial::constant(k.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn left_equivariance(g in common::pose()) {
        let poses = six_r_poses::<f64>();
        let moved: Vec<DualQuaternion<f64>> = poses.iter().map(|p| &g * p).collect();
        let base = interpolate_poses(&poses).unwrap();
        let r = interpolate_poses(&moved).unwrap();
        prop_assert!(verify_interpolation(&r, &moved).max_residual < 1e-8);
        for (a, b) in r.node_params.iter().zip(&base.node_params) {
            match (a.to_f64(), b.to_f64()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-8),
                (None, None) => {}
                _ => prop_assert!(false),
            }
        }
        prop_assert!(curve_residual(&r.curve, &base.curve.left_mul(&g)) < 1e-8);
    }

    #[test]
    fn round_trip_through_a_factorizable_cubic(
        h in prop::array::uniform3(common::revolute_h()),
        ts in prop::array::uniform3(-3.0..3.0f64),
    ) {
        prop_assume!((ts[0] - ts[1]).abs() > 0.3 && (ts[1] - ts[2]).abs() > 0.3 && (ts[0] - ts[2]).abs() > 0.3);
        let c = h.iter().fold(MotionPolynomial::constant(DualQuaternion::identity()), |acc, hi| &acc * &MotionPolynomial::linear(hi));
        let mut poses = vec![c.leading()];
        poses.extend(ts.iter().map(|t| c.evaluate(t)));
        let r = interpolate_poses(&poses).unwrap();
        prop_assert_eq!(r.curve.degree(), Some(3));
        prop_assert!(verify_interpolation(&r, &poses).max_residual < 1e-8);
    }

    #[test]
    fn resampled_interpolant_is_recovered(poses in prop::array::uniform4(common::pose())) {
        let Ok(first) = interpolate_poses(&poses) else { return Ok(()) };
        let c = first.curve;
        let s = [0.3, -1.7, 2.2];
        let samples = vec![c.leading(), c.evaluate(&s[0]), c.evaluate(&s[1]), c.evaluate(&s[2])];
        let recovered = interpolation_candidates(&samples).unwrap();
        let found = recovered.iter().any(|r| {
            let t: Vec<f64> = r.node_params[1..].iter().map(|n| n.to_f64().unwrap()).collect();
            let alpha = (s[1] - s[0]) / (t[1] - t[0]);
            let beta = s[0] - alpha * t[0];
            let affine = (alpha * t[2] + beta - s[2]).abs() < 1e-6;
            affine && curve_residual(&r.curve, &reparametrize(&c, alpha, beta)) < 1e-7
        });
        prop_assert!(found);
    }
}
