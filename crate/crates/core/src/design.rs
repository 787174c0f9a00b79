//! Denavit–Hartenberg rows and connection points for manufacturing.
//!
//! Row `i` describes the common perpendicular from axis `i` to axis
//! `i + 1` (cyclically): `d` is the offset along `zᵢ` from the frame origin
//! on axis `i` to the foot of the perpendicular, `a` its length and `alpha`
//! the twist from `zᵢ` to `zᵢ₊₁` about it. The origin on axis 0 is the foot
//! of the perpendicular from the world z-axis; every later origin is the
//! foot left by the previous row, so the last row ends on axis 0 at the
//! loop-closing foot.
//!
//! `cp0` of row `i` locates the end of joint segment `i` from origin `i`;
//! `cp1` locates the start of joint segment `i + 1` from the foot on axis
//! `i + 1`. Both are signed distances along the axis directions.

use nalgebra::{Isometry3, Matrix4, Rotation3, Translation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::mechanism::{ConnectionPoints, RationalMechanism, DEFAULT_JOINT_LENGTH};
use crate::quatcore::{PluckerLine, Point3, Vec3};
use crate::{Error, Result};

const PARALLEL_TOL: f64 = 1e-9;
const LENGTH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub i: usize,
    pub d: f64,
    pub a: f64,
    /// Degrees in `(−180, 180]`.
    pub alpha: f64,
    pub cp0: f64,
    pub cp1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignTable {
    pub rows: Vec<DhRow>,
    pub scale: f64,
    pub joint_segment_length: f64,
    /// Whether any joint segment was resized to `joint_segment_length`.
    pub cp_mapped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignFormat {
    Csv,
    Json,
}

/// Common perpendicular between two axes with the DH frame it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct DhStep {
    pub d: f64,
    pub a: f64,
    /// Radians.
    pub alpha: f64,
    /// Foot on `l0`.
    pub foot0: Point3<f64>,
    /// Foot on `l1`, origin of the next frame.
    pub foot1: Point3<f64>,
    /// Unit x-axis along the perpendicular.
    pub x: Vec3<f64>,
}

fn cross_norm(l0: &PluckerLine<f64>, l1: &PluckerLine<f64>) -> f64 {
    l0.dir.cross(&l1.dir).norm()
}

fn project(l: &PluckerLine<f64>, p: &Point3<f64>) -> Point3<f64> {
    l.point_at(l.param_of(p))
}

/// DH step from `l0` to `l1`; `origin` is the current frame origin on `l0`.
/// Parallel axes take the perpendicular through `origin`; intersecting axes
/// take `x = z₀ × z₁`.
pub fn dh_between_axes(l0: &PluckerLine<f64>, l1: &PluckerLine<f64>, origin: &Point3<f64>) -> Result<DhStep> {
    let size = origin.norm().max(l0.point_nearest_origin().norm()).max(l1.point_nearest_origin().norm()).max(1.0);
    let (foot0, foot1) = if cross_norm(l0, l1) < PARALLEL_TOL {
        let f1 = project(l1, origin);
        if (f1.clone() - origin.clone()).norm() < LENGTH_TOL * size {
            return Err(Error::CoincidentAxes { i: 0, j: 1 });
        }
        (origin.clone(), f1)
    } else {
        l0.closest_points(l1, 0.0).expect("non-parallel axes")
    };
    let w = foot1.clone() - foot0.clone();
    let a = w.norm();
    let x = if a < LENGTH_TOL * size { l0.dir.cross(&l1.dir).normalized() } else { w.scale(&(1.0 / a)) };
    let a = if a < LENGTH_TOL * size { 0.0 } else { a };
    let mut alpha = l0.dir.cross(&l1.dir).dot(&x).atan2(l0.dir.dot(&l1.dir));
    if alpha <= -std::f64::consts::PI {
        alpha += 2.0 * std::f64::consts::PI;
    }
    let d = (foot0.clone() - origin.clone()).dot(&l0.dir);
    Ok(DhStep { d, a, alpha, foot0, foot1, x })
}

/// DH frames of the loop in model units.
#[derive(Clone, Debug)]
struct Frames {
    steps: Vec<DhStep>,
    /// Origin on axis 0 and the x-axis of the base frame.
    origin0: Point3<f64>,
    base_x: Vec3<f64>,
}

impl Frames {
    /// Origin of row `i` on axis `i`.
    fn origin(&self, i: usize) -> Point3<f64> {
        if i == 0 {
            self.origin0.clone()
        } else {
            self.steps[i - 1].foot1.clone()
        }
    }
}

fn frames(joints: &[PluckerLine<f64>]) -> Result<Frames> {
    let n = joints.len();
    if n < 2 {
        return Err(Error::InvalidInput("a design needs at least two joints".into()));
    }
    let z = PluckerLine { dir: Vec3::new(0.0, 0.0, 1.0), moment: Vec3::zero() };
    let l0 = &joints[0];
    let (origin0, base_x) = match z.closest_points(l0, 1e-18) {
        Some((on_z, on_l0)) => {
            let w = on_l0.clone() - on_z;
            let x = if w.norm() > LENGTH_TOL { w.normalized() } else { z.dir.cross(&l0.dir).normalized() };
            (on_l0, x)
        }
        None => {
            let p = l0.point_nearest_origin();
            let x = if p.norm() > LENGTH_TOL { p.normalized() } else { Vec3::new(1.0, 0.0, 0.0) };
            (p, x)
        }
    };
    let mut steps = Vec::with_capacity(n);
    let mut origin = origin0.clone();
    for i in 0..n {
        let j = (i + 1) % n;
        let s = dh_between_axes(&joints[i], &joints[j], &origin).map_err(|e| match e {
            Error::CoincidentAxes { .. } => Error::CoincidentAxes { i, j },
            e => e,
        })?;
        origin = s.foot1.clone();
        steps.push(s);
    }
    Ok(Frames { steps, origin0, base_x })
}

/// Joint segments `[start, end]` as parameters along each home axis, in
/// model units relative to `point_nearest_origin`.
fn joint_segments(m: &RationalMechanism) -> Vec<(f64, f64)> {
    m.connection_points().iter().map(|c| (c.cp0, c.cp1)).collect()
}

/// Design parameters at `scale` millimetres per model unit. Joint segments
/// whose physical length differs from `joint_segment_length` are resized
/// about their midpoints.
pub fn get_design(m: &RationalMechanism, scale: f64, joint_segment_length: f64) -> Result<DesignTable> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    if !(joint_segment_length > 0.0 && joint_segment_length.is_finite()) {
        return Err(Error::InvalidInput(format!("joint length must be positive, got {joint_segment_length}")));
    }
    let joints = m.joints();
    let n = joints.len();
    let f = frames(joints)?;
    let target = joint_segment_length / scale;
    let mut mapped = false;
    let segs: Vec<(f64, f64)> = joint_segments(m)
        .into_iter()
        .enumerate()
        .map(|(j, (s, e))| {
            let len = (e - s).abs();
            if len == 0.0 {
                return Err(Error::DegenerateSegment { joint: j });
            }
            if (len - target).abs() <= 1e-6 * target {
                return Ok((s, e));
            }
            mapped = true;
            let mid = 0.5 * (s + e);
            let half = 0.5 * target * (e - s).signum();
            Ok((mid - half, mid + half))
        })
        .collect::<Result<_>>()?;
    let rows = (0..n)
        .map(|i| {
            let k = (i + 1) % n;
            let st = &f.steps[i];
            let cp0 = segs[i].1 - joints[i].param_of(&f.origin(i));
            let cp1 = segs[k].0 - joints[k].param_of(&st.foot1);
            DhRow {
                i,
                d: st.d * scale,
                a: st.a * scale,
                alpha: st.alpha.to_degrees(),
                cp0: cp0 * scale,
                cp1: cp1 * scale,
            }
        })
        .collect();
    Ok(DesignTable { rows, scale, joint_segment_length, cp_mapped: mapped })
}

/// [`get_design`] with the default joint segment length.
pub fn get_design_default(m: &RationalMechanism, scale: f64) -> Result<DesignTable> {
    get_design(m, scale, DEFAULT_JOINT_LENGTH)
}

/// Sets the mechanism's joint segments from per-row `(cp0, cp1)` values
/// given in millimetres at `scale`.
pub fn apply_design_cps(m: &RationalMechanism, cps: &[(f64, f64)], scale: f64) -> Result<RationalMechanism> {
    let n = m.joint_count();
    if cps.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} connection point rows, got {}", cps.len())));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    let joints = m.joints();
    let f = frames(joints)?;
    let out = (0..n)
        .map(|j| {
            let prev = (j + n - 1) % n;
            let start = cps[prev].1 / scale + joints[j].param_of(&f.steps[prev].foot1);
            let end = cps[j].0 / scale + joints[j].param_of(&f.origin(j));
            ConnectionPoints { cp0: start, cp1: end }
        })
        .collect();
    m.with_connection_points(out)
}

fn dh_matrix(theta: f64, d: f64, a: f64, alpha: f64) -> Matrix4<f64> {
    let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), theta);
    let rx = Rotation3::from_axis_angle(&Vector3::x_axis(), alpha);
    let iso = Isometry3::from_parts(Translation3::identity(), rz.into())
        * Translation3::new(0.0, 0.0, d)
        * Translation3::new(a, 0.0, 0.0)
        * Isometry3::from_parts(Translation3::identity(), rx.into());
    iso.to_homogeneous()
}

fn frame_matrix(origin: &Point3<f64>, x: &Vec3<f64>, z: &Vec3<f64>) -> Matrix4<f64> {
    let y = z.cross(x);
    let mut m = Matrix4::identity();
    for (c, v) in [x, &y, z, origin].into_iter().enumerate() {
        m[(0, c)] = v.x;
        m[(1, c)] = v.y;
        m[(2, c)] = v.z;
    }
    m
}

fn signed_angle(from: &Vec3<f64>, to: &Vec3<f64>, about: &Vec3<f64>) -> f64 {
    from.cross(to).dot(about).atan2(from.dot(to))
}

/// Composes the DH transforms of the loop at the home joint angles, closes
/// the loop on axis 0 and returns the largest deviation from the start
/// frame. Lengths are in model units.
pub fn frame_chain_residual(m: &RationalMechanism) -> Result<f64> {
    let joints = m.joints();
    let n = joints.len();
    let f = frames(joints)?;
    let start = frame_matrix(&f.origin0, &f.base_x, &joints[0].dir);
    let mut cur = start;
    let mut prev_x = f.base_x.clone();
    let mut worst = 0.0f64;
    for (i, s) in f.steps.iter().enumerate() {
        let theta = signed_angle(&prev_x, &s.x, &joints[i].dir);
        cur *= dh_matrix(theta, s.d, s.a, s.alpha);
        let k = (i + 1) % n;
        let expect = frame_matrix(&s.foot1, &s.x, &joints[k].dir);
        worst = worst.max((cur - expect).abs().max());
        prev_x = s.x.clone();
    }
    let theta = signed_angle(&prev_x, &f.base_x, &joints[0].dir);
    let d = (f.origin0.clone() - f.steps[n - 1].foot1.clone()).dot(&joints[0].dir);
    cur *= dh_matrix(theta, d, 0.0, 0.0);
    Ok(worst.max((cur - start).abs().max()))
}

/// CSV with header `i,d_i,a_i,alpha_i,cp0_i,cp1_i` or JSON, six decimals.
pub fn export_design(table: &DesignTable, format: DesignFormat) -> String {
    match format {
        DesignFormat::Csv => {
            let mut s = String::from("i,d_i,a_i,alpha_i,cp0_i,cp1_i\n");
            for r in &table.rows {
                s.push_str(&format!(
                    "{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                    r.i,
                    zero_sign(r.d),
                    zero_sign(r.a),
                    zero_sign(r.alpha),
                    zero_sign(r.cp0),
                    zero_sign(r.cp1)
                ));
            }
            s
        }
        DesignFormat::Json => {
            let rounded = DesignTable {
                rows: table
                    .rows
                    .iter()
                    .map(|r| DhRow {
                        i: r.i,
                        d: round6(r.d),
                        a: round6(r.a),
                        alpha: round6(r.alpha),
                        cp0: round6(r.cp0),
                        cp1: round6(r.cp1),
                    })
                    .collect(),
                ..table.clone()
            };
            let mut s = serde_json::to_string_pretty(&rounded).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

/// Parses the JSON form of [`export_design`].
pub fn load_design_json(text: &str) -> Result<DesignTable> {
    serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))
}

fn round6(v: f64) -> f64 {
    zero_sign(format!("{v:.6}").parse().expect("formatted float parses"))
}

/// Avoids printing `-0.000000`.
fn zero_sign(v: f64) -> f64 {
    if format!("{v:.6}").trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(p: [f64; 3], d: [f64; 3]) -> PluckerLine<f64> {
        let p = Vec3::from_array(p);
        let d = Vec3::from_array(d);
        PluckerLine::new(d.clone(), p.cross(&d)).unwrap()
    }

    #[test]
    fn parallel_axes() {
        let s =
            dh_between_axes(&line([0.0; 3], [0.0, 0.0, 1.0]), &line([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]), &Vec3::zero())
                .unwrap();
        assert!((s.a - 1.0).abs() < 1e-15 && s.alpha == 0.0 && s.d == 0.0);
    }

    #[test]
    fn intersecting_axes() {
        let s =
            dh_between_axes(&line([0.0; 3], [0.0, 0.0, 1.0]), &line([0.0; 3], [1.0, 0.0, 0.0]), &Vec3::zero()).unwrap();
        assert_eq!(s.a, 0.0);
        assert!((s.alpha.to_degrees() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_axes() {
        let l = line([1.0, 2.0, 3.0], [0.0, 1.0, 0.0]);
        assert!(matches!(dh_between_axes(&l, &l, &Vec3::new(1.0, 0.0, 3.0)), Err(Error::CoincidentAxes { .. })));
    }

    #[test]
    fn negative_zero_is_printed_unsigned() {
        assert_eq!(format!("{:.6}", zero_sign(-1e-9)), "0.000000");
        assert_eq!(round6(-2.5e-7), 0.0);
    }
}
