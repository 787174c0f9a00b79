//! Quaternion and dual-quaternion algebra, Plücker lines, and the action of
//! rigid displacements on points and lines.

mod dual;
mod line;
mod quaternion;
pub mod scalar;

pub use dual::{DualQuaternion, Pose};
pub use line::PluckerLine;
pub use quaternion::{Point3, Quaternion, Vec3};
pub use scalar::{ratio, Rational, Scalar, DEFAULT_TOL};
