//! Reference data: a quadratic Bennett motion, four poses whose cubic
//! interpolant yields a 6R linkage, and the matching hand-designed
//! connection points.

use crate::motionpoly::MotionPolynomial;
use crate::quatcore::{DualQuaternion, Rational, Scalar};

/// Degree-two motion polynomial of a Bennett linkage, by Study coordinate.
pub const BENNETT_COORDINATES: [[i64; 3]; 8] = [
    [0, 0, 0],
    [22134, 39870, 4440],
    [-42966, 9927, 16428],
    [-115878, -73843, -37296],
    [0, 0, 0],
    [-7812, -14586, -1332],
    [6510, -1473, -2664],
    [-3906, -1881, -1332],
];

pub fn bennett_curve<S: Scalar>() -> MotionPolynomial<S> {
    MotionPolynomial::from_coordinates(&std::array::from_fn(|i| {
        BENNETT_COORDINATES[i].iter().map(|&v| S::from_i64(v)).collect()
    }))
}

/// Identity followed by three poses; their cubic interpolant is
/// [`six_r_curve`].
pub const SIX_R_POSES: [[i64; 8]; 4] =
    [[1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 1, 1, 0, 1, 0], [1, 2, 0, 0, -2, 1, 0, 0], [3, 0, 1, 0, 1, 0, -3, 0]];

pub fn six_r_poses<S: Scalar>() -> Vec<DualQuaternion<S>> {
    SIX_R_POSES.iter().map(|p| DualQuaternion::from_i64s(*p)).collect()
}

/// Monic cubic through [`SIX_R_POSES`] (numerators over 128).
pub const SIX_R_NUMERATORS: [[i64; 4]; 8] = [
    [0, -22, -56, 128],
    [-10, -32, 32, 0],
    [-5, -10, 40, 0],
    [-5, 14, -8, 0],
    [0, 36, 0, 0],
    [-5, -16, 16, 0],
    [10, 44, -128, 0],
    [0, 0, 0, 0],
];

pub fn six_r_curve() -> MotionPolynomial<Rational> {
    MotionPolynomial::from_coordinates(&std::array::from_fn(|i| {
        SIX_R_NUMERATORS[i].iter().map(|&v| crate::quatcore::ratio(v, 128)).collect()
    }))
}

/// Hand-designed `(cp0, cp1)` pairs of the Bennett linkage at scale 200, in
/// millimetres, one row per DH link.
pub const BENNETT_DESIGN_CPS: [(f64, f64); 4] =
    [(2.085621, 17.491631), (-3.508369, -0.650840), (-21.650840, 39.381058), (60.381058, -83.494598)];

/// Scale at which [`BENNETT_DESIGN_CPS`] are given.
pub const BENNETT_DESIGN_SCALE: f64 = 200.0;

/// Joint segment length of [`BENNETT_DESIGN_CPS`] in millimetres.
pub const BENNETT_DESIGN_JOINT_LENGTH: f64 = 21.0;
