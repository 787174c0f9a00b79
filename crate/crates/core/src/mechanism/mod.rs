//! Closed 4R/6R linkages built from two factorizations of one motion.
//!
//! Joints are numbered around the loop: the factors of branch `a` from the
//! base outwards, then the factors of branch `b` from the tool back to the
//! base. Link `j` carries joints `j` and `j + 1`; the last link is the base
//! and link `m − 1` (with `m` factors per branch) is the tool.
//!
//! Kinematics use the monic curve `(t − h₁)⋯(t − hₘ)`, so the base is at
//! rest and `t = ∞` is the home configuration where every joint sits on its
//! base axis.
//!
//! The physical model is a set of line segments. Joint `j` occupies the
//! parameter interval `[cp0, cp1]` on its home axis, measured from the axis
//! point nearest the origin. Link `j` runs straight from the `cp1` end of
//! joint `j` to the `cp0` end of joint `j + 1`.

pub(crate) mod file;

pub use file::{curve_from_json, curve_to_json, format_f64, FORMAT_VERSION};

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::interp::NodeParam;
use crate::motionpoly::{
    all_factorizations, curve_residual, projective_residual, LinearFactor, MotionFactorization, MotionPolynomial,
};
use crate::quatcore::{DualQuaternion, PluckerLine, Point3, Rational};
use crate::{Error, Result};

/// Curve parameter including the point at infinity.
pub type CurveParam = NodeParam<f64>;

/// Projective tolerance for loop closure and branch agreement.
pub const CLOSURE_TOL: f64 = 1e-8;
/// Physical joint segment length in millimetres.
pub const DEFAULT_JOINT_LENGTH: f64 = 41.0;
/// Millimetres per model unit assumed until a design scale is chosen.
pub const DEFAULT_SCALE: f64 = 200.0;

/// Motion polynomial with either exact or floating point coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    Exact(MotionPolynomial<Rational>),
    Float(MotionPolynomial<f64>),
}

impl Curve {
    pub fn to_f64(&self) -> MotionPolynomial<f64> {
        match self {
            Curve::Exact(c) => c.to_f64(),
            Curve::Float(c) => c.clone(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Curve::Exact(c) => c.degree(),
            Curve::Float(c) => c.degree(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Curve::Exact(_))
    }

    pub fn factorizations(&self) -> Result<Vec<MotionFactorization>> {
        match self {
            Curve::Exact(c) => all_factorizations(c),
            Curve::Float(c) => all_factorizations(c),
        }
    }

    fn residual_to(&self, f: &MotionFactorization) -> f64 {
        match self {
            Curve::Exact(c) => f.residual(c),
            Curve::Float(c) => f.residual(c),
        }
    }
}

impl From<MotionPolynomial<Rational>> for Curve {
    fn from(c: MotionPolynomial<Rational>) -> Self {
        Curve::Exact(c)
    }
}

impl From<MotionPolynomial<f64>> for Curve {
    fn from(c: MotionPolynomial<f64>) -> Self {
        Curve::Float(c)
    }
}

/// Bounds of one joint segment along its home axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionPoints {
    pub cp0: f64,
    pub cp1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    A,
    B,
}

/// Identifier of a physical segment. Joints order before links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SegmentId {
    Joint(usize),
    Link(usize),
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentId::Joint(j) => write!(f, "J{j}"),
            SegmentId::Link(j) => write!(f, "L{j}"),
        }
    }
}

impl std::str::FromStr for SegmentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseError(format!("bad segment id {s:?}"));
        let (kind, idx) = s.split_at_checked(1).ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "J" => Ok(SegmentId::Joint(idx)),
            "L" => Ok(SegmentId::Link(idx)),
            _ => Err(bad()),
        }
    }
}

/// Segment in home configuration, rigidly attached to link `body`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: SegmentId,
    pub body: usize,
    pub ends: [Point3<f64>; 2],
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.ends[1].clone() - self.ends[0].clone()).norm()
    }
}

/// Moved joint axis with its segment end points.
#[derive(Clone, Debug, PartialEq)]
pub struct JointFrame {
    pub axis: PluckerLine<f64>,
    pub segment: [Point3<f64>; 2],
}

/// Serializable snapshot of the whole linkage at one drive angle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Configuration {
    /// `None` at the point at infinity.
    pub t: Option<f64>,
    pub angle: f64,
    pub tool: [f64; 8],
    pub joints: Vec<JointState>,
    pub links: Vec<[[f64; 3]; 2]>,
    pub closure_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointState {
    pub direction: [f64; 3],
    pub moment: [f64; 3],
    pub segment: [[f64; 3]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMechanism {
    curve: Curve,
    branch_a: MotionFactorization,
    branch_b: MotionFactorization,
    joints: Vec<PluckerLine<f64>>,
    connection_points: Vec<ConnectionPoints>,
    scale: f64,
    metadata: Map<String, Value>,
}

fn disjoint_axes(a: &MotionFactorization, b: &MotionFactorization) -> bool {
    a.factors.iter().all(|f| b.factors.iter().all(|g| !f.axis.approx_eq(&g.axis, AXIS_TOL)))
}

const AXIS_TOL: f64 = 1e-9;

impl RationalMechanism {
    /// Factorizes `curve` and closes two of its factorizations.
    pub fn from_curve(curve: Curve) -> Result<Self> {
        let f = curve.factorizations()?;
        Self::assemble(curve, &f)
    }

    /// Closes the first factorization with the first later one that shares
    /// no joint axis with it (the second one if none does), using default
    /// connection points.
    pub fn assemble(curve: Curve, factorizations: &[MotionFactorization]) -> Result<Self> {
        let [a, rest @ ..] = factorizations else {
            return Err(Error::FewerThanTwoFactorizations { found: 0 });
        };
        let Some(b) = rest.iter().find(|b| disjoint_axes(a, b)).or(rest.first()) else {
            return Err(Error::FewerThanTwoFactorizations { found: 1 });
        };
        if a.factors.len() != b.factors.len() || a.factors.is_empty() {
            return Err(Error::BranchMismatch { residual: f64::INFINITY });
        }
        let residual =
            curve_residual(&a.monic_product(), &b.monic_product()).max(curve.residual_to(a)).max(curve.residual_to(b));
        if !(residual <= CLOSURE_TOL) {
            return Err(Error::BranchMismatch { residual });
        }
        let joints: Vec<PluckerLine<f64>> =
            a.factors.iter().chain(b.factors.iter().rev()).map(|f| f.axis.clone()).collect();
        let connection_points = default_connection_points(&joints, DEFAULT_SCALE);
        let m = Self {
            curve,
            branch_a: a.clone(),
            branch_b: b.clone(),
            joints,
            connection_points,
            scale: DEFAULT_SCALE,
            metadata: Map::new(),
        };
        m.validate_segments(&m.connection_points)?;
        Ok(m)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn branch_a(&self) -> &MotionFactorization {
        &self.branch_a
    }

    pub fn branch_b(&self) -> &MotionFactorization {
        &self.branch_b
    }

    /// Home axes in loop order.
    pub fn joints(&self) -> &[PluckerLine<f64>] {
        &self.joints
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    /// Factors per branch.
    pub fn branch_len(&self) -> usize {
        self.branch_a.factors.len()
    }

    pub fn connection_points(&self) -> &[ConnectionPoints] {
        &self.connection_points
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn metadata(&self) -> &Map<String, Value> {
        &self.metadata
    }

    pub fn with_metadata(mut self, metadata: Map<String, Value>) -> Self {
        self.metadata = metadata;
        self
    }

    /// Changes the model-to-millimetre scale and resets the connection
    /// points to the default segment length at that scale.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
        }
        self.scale = scale;
        self.connection_points = default_connection_points(&self.joints, scale);
        self.validate_segments(&self.connection_points)?;
        Ok(self)
    }

    /// Factor of joint `j`.
    pub fn joint_factor(&self, j: usize) -> &LinearFactor {
        let m = self.branch_len();
        if j < m {
            &self.branch_a.factors[j]
        } else {
            &self.branch_b.factors[self.joint_count() - 1 - j]
        }
    }

    /// Branch and factor prefix whose product moves link `link`.
    pub fn link_chain(&self, link: usize) -> (Branch, usize) {
        let (m, n) = (self.branch_len(), self.joint_count());
        if link < m {
            (Branch::A, link + 1)
        } else {
            (Branch::B, n - 1 - link)
        }
    }

    pub fn link_factors(&self, link: usize) -> &[LinearFactor] {
        match self.link_chain(link) {
            (Branch::A, k) => &self.branch_a.factors[..k],
            (Branch::B, k) => &self.branch_b.factors[..k],
        }
    }

    /// Link that carries the segment of joint `j`.
    pub fn joint_body(&self, j: usize) -> usize {
        let (m, n) = (self.branch_len(), self.joint_count());
        if j < m {
            (j + n - 1) % n
        } else {
            j
        }
    }

    pub fn base_link(&self) -> usize {
        self.joint_count() - 1
    }

    pub fn tool_link(&self) -> usize {
        self.branch_len() - 1
    }

    /// Unnormalized displacement of link `link` at `t`.
    pub fn link_pose(&self, link: usize, t: &CurveParam) -> DualQuaternion<f64> {
        product_at(self.link_factors(link), t)
    }

    /// Normalized tool pose at `t`.
    pub fn pose_at(&self, t: &CurveParam) -> Result<DualQuaternion<f64>> {
        let p = self.link_pose(self.tool_link(), t);
        check_pose(&p)?;
        Ok(p.normalized())
    }

    /// Projective distance between the two branch products at `t`.
    pub fn closure_residual(&self, t: &CurveParam) -> f64 {
        let a = product_at(&self.branch_a.factors, t);
        let b = product_at(&self.branch_b.factors, t);
        projective_residual(&a.to_array(), &b.to_array())
    }

    /// Moved axis and segment of every joint.
    pub fn joint_frames_at(&self, t: &CurveParam) -> Result<Vec<JointFrame>> {
        let poses = self.link_poses(t)?;
        self.segments()
            .into_iter()
            .filter(|s| matches!(s.id, SegmentId::Joint(_)))
            .zip(&self.joints)
            .map(|(s, axis)| {
                let p = &poses[s.body];
                Ok(JointFrame { axis: p.act_on_line(axis)?, segment: move_ends(p, &s.ends)? })
            })
            .collect()
    }

    /// Moved end points of every link segment.
    pub fn link_segments_at(&self, t: &CurveParam) -> Result<Vec<[Point3<f64>; 2]>> {
        let poses = self.link_poses(t)?;
        self.segments()
            .into_iter()
            .filter(|s| matches!(s.id, SegmentId::Link(_)))
            .map(|s| move_ends(&poses[s.body], &s.ends))
            .collect()
    }

    fn link_poses(&self, t: &CurveParam) -> Result<Vec<DualQuaternion<f64>>> {
        (0..self.joint_count())
            .map(|l| {
                let p = self.link_pose(l, t);
                check_pose(&p)?;
                Ok(p)
            })
            .collect()
    }

    /// Full snapshot at a drive angle.
    pub fn configuration(&self, angle: f64) -> Result<Configuration> {
        let t = self.drive_angle_to_param(angle);
        let joints = self
            .joint_frames_at(&t)?
            .into_iter()
            .map(|f| JointState {
                direction: f.axis.dir.to_array(),
                moment: f.axis.moment.to_array(),
                segment: f.segment.map(|p| p.to_array()),
            })
            .collect();
        let links = self.link_segments_at(&t)?.into_iter().map(|s| s.map(|p| p.to_array())).collect();
        Ok(Configuration {
            t: t.to_f64(),
            angle: angle.rem_euclid(TAU),
            tool: self.pose_at(&t)?.to_array(),
            joints,
            links,
            closure_residual: self.closure_residual(&t),
        })
    }

    /// `(a₀, ‖vec a‖)` of the driving factor's `h`.
    fn drive_constants(&self) -> (f64, f64) {
        let h = &self.branch_a.factors[0].h;
        (h.primal.w, h.primal.vector().norm())
    }

    /// Curve parameter at which the driving joint has rotated by `angle`:
    /// `t = a₀ + ‖vec a‖ cot(φ/2)`, with `φ = 0` at `t = ∞`.
    pub fn drive_angle_to_param(&self, angle: f64) -> CurveParam {
        let phi = angle.rem_euclid(TAU);
        if phi == 0.0 {
            return CurveParam::Infinity;
        }
        let (a0, r) = self.drive_constants();
        let half = phi / 2.0;
        CurveParam::Finite(a0 + r * half.cos() / half.sin())
    }

    /// Inverse of [`Self::drive_angle_to_param`], in `[0, 2π)`.
    pub fn param_to_drive_angle(&self, t: &CurveParam) -> f64 {
        match t {
            CurveParam::Infinity => 0.0,
            CurveParam::Finite(t) => {
                let (a0, r) = self.drive_constants();
                let phi = 2.0 * r.atan2(t - a0);
                if phi >= TAU {
                    0.0
                } else {
                    phi
                }
            }
        }
    }

    /// Joint and link segments in home configuration, joints first.
    pub fn segments(&self) -> Vec<Segment> {
        segments_for(self, &self.connection_points)
    }

    /// Replaces the segment bounds of one joint.
    pub fn set_connection_points(&self, joint: usize, cp0: f64, cp1: f64) -> Result<Self> {
        if joint >= self.joint_count() {
            return Err(Error::InvalidInput(format!("joint {joint} out of range 0..{}", self.joint_count())));
        }
        let mut cps = self.connection_points.clone();
        cps[joint] = ConnectionPoints { cp0, cp1 };
        self.with_connection_points(cps)
    }

    /// Replaces all segment bounds.
    pub fn with_connection_points(&self, cps: Vec<ConnectionPoints>) -> Result<Self> {
        if cps.len() != self.joint_count() {
            return Err(Error::InvalidInput(format!(
                "expected {} connection point pairs, got {}",
                self.joint_count(),
                cps.len()
            )));
        }
        self.validate_segments(&cps)?;
        Ok(Self { connection_points: cps, ..self.clone() })
    }

    fn validate_segments(&self, cps: &[ConnectionPoints]) -> Result<()> {
        for (j, c) in cps.iter().enumerate() {
            let size = c.cp0.abs().max(c.cp1.abs()).max(1.0);
            if !c.cp0.is_finite() || !c.cp1.is_finite() || (c.cp1 - c.cp0).abs() <= 1e-12 * size {
                return Err(Error::DegenerateSegment { joint: j });
            }
        }
        for s in segments_for(self, cps) {
            if let SegmentId::Link(j) = s.id {
                let size = s.ends.iter().map(|p| p.norm()).fold(1.0, f64::max);
                if s.length() <= 1e-12 * size {
                    return Err(Error::DegenerateSegment { joint: j });
                }
            }
        }
        Ok(())
    }
}

fn segments_for(m: &RationalMechanism, cps: &[ConnectionPoints]) -> Vec<Segment> {
    let n = m.joint_count();
    let joints = (0..n).map(|j| Segment {
        id: SegmentId::Joint(j),
        body: m.joint_body(j),
        ends: [m.joints[j].point_at(cps[j].cp0), m.joints[j].point_at(cps[j].cp1)],
    });
    let links = (0..n).map(|j| {
        let k = (j + 1) % n;
        Segment {
            id: SegmentId::Link(j),
            body: j,
            ends: [m.joints[j].point_at(cps[j].cp1), m.joints[k].point_at(cps[k].cp0)],
        }
    });
    joints.chain(links).collect()
}

/// Symmetric segments of length `DEFAULT_JOINT_LENGTH / scale` centred
/// between the feet of the common perpendiculars to the neighbouring axes.
pub fn default_connection_points(joints: &[PluckerLine<f64>], scale: f64) -> Vec<ConnectionPoints> {
    let n = joints.len();
    let half = DEFAULT_JOINT_LENGTH / scale / 2.0;
    (0..n)
        .map(|j| {
            let feet: Vec<f64> = [(j + n - 1) % n, (j + 1) % n]
                .iter()
                .filter_map(|&k| joints[j].closest_params(&joints[k], 1e-12).map(|(s, _)| s))
                .collect();
            let mid = if feet.is_empty() { 0.0 } else { feet.iter().sum::<f64>() / feet.len() as f64 };
            ConnectionPoints { cp0: mid - half, cp1: mid + half }
        })
        .collect()
}

fn product_at(factors: &[LinearFactor], t: &CurveParam) -> DualQuaternion<f64> {
    match t {
        CurveParam::Infinity => DualQuaternion::identity(),
        CurveParam::Finite(t) => factors.iter().fold(DualQuaternion::identity(), |acc, f| &acc * &f.at(*t)),
    }
}

fn check_pose(p: &DualQuaternion<f64>) -> Result<()> {
    let n = p.primal.norm_sq();
    if !(n > 1e-24 * p.max_abs().powi(2)) || !n.is_finite() {
        return Err(Error::DegenerateParameter);
    }
    Ok(())
}

fn move_ends(p: &DualQuaternion<f64>, ends: &[Point3<f64>; 2]) -> Result<[Point3<f64>; 2]> {
    Ok([p.act_on_point(&ends[0])?, p.act_on_point(&ends[1])?])
}
