mod common;

use proptest::prelude::*;
use ratlink::fixtures::{bennett_curve, six_r_curve, BENNETT_COORDINATES};
use ratlink::motionpoly::*;
use ratlink::quatcore::{ratio, DualQuaternion, Quaternion, Rational, Vec3};
use ratlink::Error;

#[test]
fn bennett_values_at_zero_and_one() {
    let c = bennett_curve::<Rational>();
    assert_eq!(c.evaluate(&ratio(0, 1)), DualQuaternion::from_i64s([0, 22134, -42966, -115878, 0, -7812, 6510, -3906]));
    let at_one = c.evaluate(&ratio(1, 1));
    let expect: [i64; 8] = std::array::from_fn(|i| BENNETT_COORDINATES[i].iter().sum());
    assert_eq!(at_one, DualQuaternion::from_i64s(expect));
    assert_eq!(expect[1], 66444);
}

#[test]
fn bennett_norm_polynomial_exact() {
    let nu = bennett_curve::<Rational>().norm_polynomial().unwrap();
    assert_eq!(nu.degree(), Some(4));
    let expect: i64 = 22134 * 22134 + 42966 * 42966 + 115878 * 115878;
    assert_eq!(nu.coeff(0), ratio(expect, 1));
}

#[test]
fn six_r_curve_is_a_motion_polynomial() {
    let nu = six_r_curve().norm_polynomial().unwrap();
    assert_eq!(nu.degree(), Some(6));
}

#[test]
fn bennett_quadratic_factors_multiply_back() {
    let nu = bennett_curve::<f64>().norm_polynomial().unwrap();
    let q = quadratic_real_factors(&nu).unwrap();
    assert_eq!(q.len(), 2);
    assert!(q[0] != q[1]);
    let prod = q.iter().fold(RealPolynomial::one(), |acc, f| &acc * f).scale(&nu.leading());
    let err = (&prod - &nu).max_abs_coeff() / nu.max_abs_coeff();
    assert!(err < 1e-8, "{err}");
}

/// Factor values computed independently with a NumPy implementation of the
/// same remainder-extraction scheme.
const BRANCH_A: [[f64; 8]; 2] = [
    [-1.389839, 0.687677, -0.715891, 0.70107, 0.0, 0.279826, 0.233347, -0.0362],
    [-0.451278, -1.189203, 0.026173, -1.06458, 0.0, -0.205981, 0.005192, 0.230221],
];
const BRANCH_B: [[f64; 8]; 2] = [
    [-0.451278, -1.373369, -0.655244, 0.482421, 0.0, -0.116474, 0.242442, -0.002286],
    [-1.389839, 0.871844, -0.034474, -0.845931, 0.0, 0.190319, -0.003903, 0.196308],
];

#[test]
fn bennett_has_two_factorizations() {
    let c = bennett_curve::<Rational>();
    let fs = all_factorizations(&c).unwrap();
    assert_eq!(fs.len(), 2);
    for (f, reference) in fs.iter().zip([BRANCH_A, BRANCH_B]) {
        assert!(f.residual(&c) < 1e-8);
        for (h, r) in f.hs().iter().zip(reference) {
            let d = (h.clone() - DualQuaternion::from_array(r)).max_abs();
            assert!(d < 1e-5, "{h:?} vs {r:?}");
        }
    }
    assert!(!fs[0].same_as(&fs[1], DEDUP_TOL));
}

#[test]
fn factor_norms_are_norm_quadratics() {
    let c = bennett_curve::<f64>();
    let setup = FactorizationSetup::new(&c).unwrap();
    for order in permutations(2) {
        let f = setup.factorize(&order).unwrap();
        for (factor, &k) in f.factors.iter().zip(&order) {
            let n = factor.polynomial().norm_polynomial().unwrap();
            assert!((&n - &setup.quads[k]).max_abs_coeff() < 1e-8);
        }
    }
}

#[test]
fn bennett_axes_are_fixed_lines() {
    for f in all_factorizations(&bennett_curve::<f64>()).unwrap() {
        for factor in &f.factors {
            let l = &factor.axis;
            assert!(l.dir.dot(&l.moment).abs() < 1e-10);
            for tau in [-2.0, -1.0, 0.0, 1.0, 2.0, 0.5, 7.0, -30.0] {
                let img = factor.at(tau).act_on_line(l).unwrap();
                assert!(img.approx_eq(l, 1e-9), "tau {tau}");
            }
        }
    }
}

#[test]
fn six_r_factorizations() {
    let c = six_r_curve();
    let fs = all_factorizations(&c).unwrap();
    assert!((2..=6).contains(&fs.len()), "{}", fs.len());
    for f in &fs {
        assert_eq!(f.factors.len(), 3);
        assert!(f.residual(&c) < 1e-8);
    }
}

#[test]
fn single_joint_cannot_close_a_loop() {
    let h = DualQuaternion::from_i64s([1, 0, 0, 1, 0, 2, 0, 0]);
    let c = MotionPolynomial::<f64>::linear(&h);
    assert_eq!(factorize(&c, &[0]).unwrap().factors.len(), 1);
    assert_eq!(all_factorizations(&c), Err(Error::FewerThanTwoFactorizations { found: 1 }));
}

#[test]
fn real_norm_root_rejected() {
    let h = DualQuaternion::from_i64s([0, 0, 0, 1, 0, 0, 0, 0]);
    let c = MotionPolynomial::<Rational>::linear(&h).mul_real(&RealPolynomial::from_i64s(&[-1, 1]));
    assert_eq!(all_factorizations(&c), Err(Error::RealRootPresent));
}

#[test]
fn real_content_is_stripped() {
    let base = bennett_curve::<Rational>();
    let content = RealPolynomial::<Rational>::from_i64s(&[5, 2, 1]);
    let c = base.mul_real(&content);
    let fs = all_factorizations(&c).unwrap();
    assert_eq!(fs.len(), 2);
    for f in &fs {
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.real_cofactor.degree(), Some(2));
        assert!(f.residual(&c) < 1e-8);
    }
    let cf = all_factorizations(&base.to_f64().mul_real(&content.to_f64())).unwrap();
    assert!(cf[0].same_as(&fs[0], 1e-6));
}

fn revolute(w: f64, axis: Vec3<f64>, moment_point: Vec3<f64>) -> DualQuaternion<f64> {
    let p = DualQuaternion::from_translation(&moment_point);
    let hz = DualQuaternion::new(Quaternion::new(w, axis.x, axis.y, axis.z), Quaternion::zero());
    &(&p * &hz) * &p.inverse().unwrap()
}

#[test]
fn divide_off_right_factor() {
    let h1 = revolute(0.3, Vec3::new(0.0, 1.0, 1.0), Vec3::new(1.0, 0.0, 2.0));
    let h2 = revolute(-1.1, Vec3::new(1.0, 0.2, 0.0), Vec3::new(0.0, -1.0, 0.5));
    let prod = &MotionPolynomial::linear(&h1) * &MotionPolynomial::linear(&h2);
    let (q, r) = prod.right_divide(&MotionPolynomial::linear(&h2)).unwrap();
    assert!(r.scale_f64() < 1e-12);
    assert!(curve_residual(&q, &MotionPolynomial::linear(&h1)) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn right_division_reconstructs(
        c in prop::collection::vec(common::dual_quaternion(), 1..6),
        d in prop::collection::vec(common::dual_quaternion(), 1..4),
    ) {
        let c = MotionPolynomial::new(c);
        let d = MotionPolynomial::new(d);
        prop_assume!(d.leading().primal.norm_sq() > 1e-2);
        let (q, r) = c.right_divide(&d).unwrap();
        prop_assert!(r.degree().map_or(true, |k| k < d.degree().unwrap()));
        let back = &(&q * &d) + &r;
        let scale = c.scale_f64().max(1.0) * (1.0 + q.scale_f64()) * (1.0 + d.scale_f64());
        prop_assert!((&back - &c).scale_f64() <= 1e-9 * scale);
    }

    #[test]
    fn axis_of_conjugated_rotation(p in common::pose(), w in -2.0..2.0f64) {
        let hz = DualQuaternion::new(Quaternion::new(w, 0.0, 0.0, 1.0), Quaternion::zero());
        let h = &(&p * &hz) * &p.inverse().unwrap();
        let expect = p.act_on_line(&ratlink::quatcore::PluckerLine::new(Vec3::new(0.0, 0.0, 1.0), Vec3::zero()).unwrap()).unwrap();
        let got = axis_of_factor(&h).unwrap();
        prop_assert!(got.approx_eq(&expect, 1e-9));
    }

    #[test]
    fn products_of_revolutes_factor_back(h1 in common::revolute_h(), h2 in common::revolute_h()) {
        let c = &MotionPolynomial::linear(&h1) * &MotionPolynomial::linear(&h2);
        let nu = c.norm_polynomial().unwrap();
        let n1 = MotionPolynomial::linear(&h1).norm_polynomial().unwrap();
        let n2 = MotionPolynomial::linear(&h2).norm_polynomial().unwrap();
        prop_assert!((&nu - &(&n1 * &n2)).max_abs_coeff() <= 1e-8 * nu.max_abs_coeff());
        if let Ok(fs) = all_factorizations(&c) {
            for f in fs {
                prop_assert!(f.residual(&c) < 1e-8);
            }
        }
    }
}
