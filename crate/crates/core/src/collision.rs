//! Full-cycle self-collision analysis of the line-segment model.
//!
//! For every pair of segments that do not share a joint, segment `A` is
//! carried into the frame of segment `B` by the relative motion
//! `R = Y_B* · Y_A`, where `Y` are the link displacements with their common
//! chain prefix removed. The moved carrier line `R_ε l_A R_ε*` meets the
//! fixed line `l_B` exactly at the real roots of
//! `F(t) = g(t)·m_B + m(t)·g_B`. Each root is then tested for membership
//! in both segments. The home configuration `t = ∞` is tested directly.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::mechanism::{Branch, CurveParam, RationalMechanism, Segment, SegmentId};
use crate::motionpoly::{real_roots, LinearFactor, MotionPolynomial, RealPolynomial};
use crate::quatcore::{DualQuaternion, PluckerLine, Point3};
use crate::{Error, Result};

/// Default tolerance for distances and degeneracy tests.
pub const COLLISION_TOL: f64 = 1e-6;
/// Segment membership slack as a fraction of segment length.
pub const MEMBERSHIP_EPS: f64 = 1e-7;
/// Angle samples used to scan pairs whose lines stay coplanar.
const COPLANAR_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CollisionKind {
    #[serde(rename = "segment-segment")]
    SegmentContact,
    #[serde(rename = "parallel-overlap")]
    ParallelOverlap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionEvent {
    pub t: CurveParam,
    pub angle: f64,
    pub pair: (SegmentId, SegmentId),
    /// Contact point in world coordinates.
    pub point: Point3<f64>,
    pub kind: CollisionKind,
}

/// Serialized form of a [`CollisionEvent`]; `t` is `null` at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub t: Option<f64>,
    pub angle: f64,
    pub pair: [String; 2],
    pub point: [f64; 3],
    pub kind: CollisionKind,
}

impl From<&CollisionEvent> for EventRecord {
    fn from(e: &CollisionEvent) -> Self {
        Self {
            t: e.t.to_f64(),
            angle: e.angle,
            pair: [e.pair.0.to_string(), e.pair.1.to_string()],
            point: e.point.to_array(),
            kind: e.kind,
        }
    }
}

/// Two segments and the motion of the first relative to the second.
#[derive(Clone, Debug)]
pub struct SegmentPair {
    pub a: Segment,
    pub b: Segment,
    pub relative: MotionPolynomial<f64>,
}

/// True when the segments meet at a common joint axis.
pub fn shares_joint(n: usize, a: SegmentId, b: SegmentId) -> bool {
    let touches = |s: SegmentId, j: usize| match s {
        SegmentId::Joint(k) => k == j,
        SegmentId::Link(l) => l == j || (l + 1) % n == j,
    };
    match (a, b) {
        (SegmentId::Joint(_), SegmentId::Joint(_)) => false,
        _ => (0..n).any(|j| touches(a, j) && touches(b, j)),
    }
}

/// Chains `(branch, prefix length)` that realize the pose of `link`.
fn chains(m: &RationalMechanism, link: usize) -> Vec<(Branch, usize)> {
    let mut out = vec![m.link_chain(link)];
    if link == m.base_link() {
        out.push((Branch::A, 0));
    }
    if link == m.tool_link() {
        out.push((Branch::B, m.branch_len()));
    }
    out
}

fn factors(m: &RationalMechanism, (branch, k): (Branch, usize)) -> &[LinearFactor] {
    match branch {
        Branch::A => &m.branch_a().factors[..k],
        Branch::B => &m.branch_b().factors[..k],
    }
}

fn product(f: &[LinearFactor]) -> MotionPolynomial<f64> {
    f.iter().fold(MotionPolynomial::constant(DualQuaternion::identity()), |acc, f| &acc * &f.polynomial())
}

/// Lowest-degree `Y_B* Y_A` over the available chains of both links.
fn relative_motion(m: &RationalMechanism, body_a: usize, body_b: usize) -> MotionPolynomial<f64> {
    let mut best: Option<(usize, &[LinearFactor], &[LinearFactor])> = None;
    for ca in chains(m, body_a) {
        for cb in chains(m, body_b) {
            let common = if ca.0 == cb.0 { ca.1.min(cb.1) } else { 0 };
            let fa = &factors(m, ca)[common..];
            let fb = &factors(m, cb)[common..];
            let deg = fa.len() + fb.len();
            if best.is_none_or(|(d, _, _)| deg < d) {
                best = Some((deg, fa, fb));
            }
        }
    }
    let (_, fa, fb) = best.expect("every link has a chain");
    &product(fb).conj() * &product(fa)
}

/// All segment pairs that do not share a joint, `a` before `b` by id.
pub fn segment_pairs(m: &RationalMechanism) -> Vec<SegmentPair> {
    let segs = m.segments();
    let n = m.joint_count();
    let mut out = Vec::new();
    for (i, a) in segs.iter().enumerate() {
        for b in &segs[i + 1..] {
            if shares_joint(n, a.id, b.id) {
                continue;
            }
            let relative = relative_motion(m, a.body, b.body);
            out.push(SegmentPair { a: a.clone(), b: b.clone(), relative });
        }
    }
    out
}

fn carrier(s: &Segment) -> Option<PluckerLine<f64>> {
    PluckerLine::from_two_points(&s.ends[0], &s.ends[1]).ok()
}

/// `R_ε l R_ε*` as a polynomial; its vector parts are the moved Plücker
/// coordinates scaled by `|primal R|²`.
fn moved_line(r: &MotionPolynomial<f64>, l: &PluckerLine<f64>) -> MotionPolynomial<f64> {
    let re = MotionPolynomial::new(r.coeffs().iter().map(DualQuaternion::eps_conj).collect());
    let lq = MotionPolynomial::constant(DualQuaternion::embed_line(l));
    &(&re * &lq) * &re.conj()
}

/// Polynomial whose real roots are the parameters at which the carrier
/// lines of the pair are coplanar.
pub fn intersection_polynomial(pair: &SegmentPair) -> RealPolynomial<f64> {
    let (Some(la), Some(lb)) = (carrier(&pair.a), carrier(&pair.b)) else {
        return RealPolynomial::zero();
    };
    intersection_parts(pair, &la, &lb).0
}

/// The intersection polynomial and the magnitude of its summands.
fn intersection_parts(pair: &SegmentPair, la: &PluckerLine<f64>, lb: &PluckerLine<f64>) -> (RealPolynomial<f64>, f64) {
    let moved = moved_line(&pair.relative, la);
    let c = moved.coordinates();
    let gb = lb.dir.to_array();
    let mb = lb.moment.to_array();
    let mut f = RealPolynomial::zero();
    let mut size = 0.0f64;
    for i in 0..3 {
        f = &f + &(&c[1 + i].scale(&mb[i]) + &c[5 + i].scale(&gb[i]));
        size = size.max(c[1 + i].max_abs_coeff() * mb[i].abs()).max(c[5 + i].max_abs_coeff() * gb[i].abs());
    }
    (f, size)
}

/// Closest parameters of two segments given as end points, each in `[0, 1]`
/// along its segment, unclamped. `None` for parallel carriers.
fn line_params(p: &[Point3<f64>; 2], q: &[Point3<f64>; 2], tol: f64) -> Option<(f64, f64)> {
    let d1 = p[1].clone() - p[0].clone();
    let d2 = q[1].clone() - q[0].clone();
    let r = p[0].clone() - q[0].clone();
    let (a, e, b) = (d1.dot(&d1), d2.dot(&d2), d1.dot(&d2));
    let (c, f) = (d1.dot(&r), d2.dot(&r));
    let den = a * e - b * b;
    if den <= tol * tol * a * e {
        return None;
    }
    Some(((b * f - c * e) / den, (a * f - b * c) / den))
}

fn inside(s: f64) -> bool {
    (-MEMBERSHIP_EPS..=1.0 + MEMBERSHIP_EPS).contains(&s)
}

fn lerp(p: &[Point3<f64>; 2], s: f64) -> Point3<f64> {
    p[0].clone() + (p[1].clone() - p[0].clone()).scale(&s)
}

/// Contact of two segments in a common frame.
fn contact(pa: &[Point3<f64>; 2], pb: &[Point3<f64>; 2], tol: f64) -> Option<(Point3<f64>, CollisionKind)> {
    let size = pa.iter().chain(pb).map(|p| p.norm()).fold(1.0, f64::max);
    match line_params(pa, pb, tol) {
        Some((s, u)) => {
            let (x, y) = (lerp(pa, s), lerp(pb, u));
            let gap = (x.clone() - y.clone()).norm();
            (inside(s) && inside(u) && gap <= tol * size).then(|| ((x + y).scale(&0.5), CollisionKind::SegmentContact))
        }
        None => {
            let d = pb[1].clone() - pb[0].clone();
            let len2 = d.dot(&d);
            let proj = |p: &Point3<f64>| (p.clone() - pb[0].clone()).dot(&d) / len2;
            let (s0, s1) = (proj(&pa[0]), proj(&pa[1]));
            let foot = lerp(pb, s0);
            let gap = (pa[0].clone() - foot).norm();
            let (lo, hi) = (s0.min(s1).max(0.0), s0.max(s1).min(1.0));
            (gap <= tol * size && hi >= lo - MEMBERSHIP_EPS)
                .then(|| (lerp(pb, 0.5 * (lo + hi).clamp(0.0, 1.0)), CollisionKind::ParallelOverlap))
        }
    }
}

fn eval_relative(r: &MotionPolynomial<f64>, t: &CurveParam) -> DualQuaternion<f64> {
    match t {
        CurveParam::Finite(t) => r.evaluate(t),
        CurveParam::Infinity => r.leading(),
    }
}

/// Event for the pair at `t`, if the segments touch there.
fn event_at(m: &RationalMechanism, pair: &SegmentPair, t: CurveParam, tol: f64) -> Option<CollisionEvent> {
    let r = eval_relative(&pair.relative, &t);
    let pa = [r.act_on_point(&pair.a.ends[0]).ok()?, r.act_on_point(&pair.a.ends[1]).ok()?];
    let (local, kind) = contact(&pa, &pair.b.ends, tol)?;
    let point = m.link_pose(pair.b.body, &t).act_on_point(&local).ok()?;
    Some(CollisionEvent { angle: m.param_to_drive_angle(&t), t, pair: (pair.a.id, pair.b.id), point, kind })
}

/// Events of one pair, ordered by `t`.
pub fn pair_events(m: &RationalMechanism, pair: &SegmentPair, tol: f64) -> Vec<CollisionEvent> {
    let (Some(la), Some(lb)) = (carrier(&pair.a), carrier(&pair.b)) else {
        return Vec::new();
    };
    let (f, size) = intersection_parts(pair, &la, &lb);
    let mut out = Vec::new();
    if f.max_abs_coeff() <= 1e-12 * size.max(f64::MIN_POSITIVE) {
        coplanar_scan(m, pair, tol, &mut out);
    } else {
        let f = f.trimmed(1e-14);
        for t in real_roots(&f) {
            out.extend(event_at(m, pair, CurveParam::Finite(t), tol));
        }
        out.extend(event_at(m, pair, CurveParam::Infinity, tol));
    }
    out
}

/// Carriers stay coplanar for all `t`: report one event per angle interval
/// with contact, at its midpoint.
fn coplanar_scan(m: &RationalMechanism, pair: &SegmentPair, tol: f64, out: &mut Vec<CollisionEvent>) {
    let step = std::f64::consts::TAU / COPLANAR_SAMPLES as f64;
    let hit: Vec<bool> = (0..COPLANAR_SAMPLES)
        .map(|k| event_at(m, pair, m.drive_angle_to_param(k as f64 * step), tol).is_some())
        .collect();
    if hit.iter().all(|&h| h) {
        out.extend(event_at(m, pair, m.drive_angle_to_param(std::f64::consts::PI), tol));
        return;
    }
    let start = hit.iter().position(|&h| !h).expect("some sample misses");
    let mut k = 0;
    while k < COPLANAR_SAMPLES {
        let i = (start + k) % COPLANAR_SAMPLES;
        if !hit[i] {
            k += 1;
            continue;
        }
        let first = start + k;
        while k < COPLANAR_SAMPLES && hit[(start + k) % COPLANAR_SAMPLES] {
            k += 1;
        }
        let mid = 0.5 * (first + start + k - 1) as f64 * step;
        out.extend(event_at(m, pair, m.drive_angle_to_param(mid), tol));
    }
}

fn param_key(t: &CurveParam) -> f64 {
    t.to_f64().unwrap_or(f64::INFINITY)
}

/// Sort order of reports: by `t` (infinity last), then by pair.
pub fn event_order(a: &CollisionEvent, b: &CollisionEvent) -> Ordering {
    param_key(&a.t).total_cmp(&param_key(&b.t)).then(a.pair.cmp(&b.pair))
}

/// All physical collisions over the full cycle using the global thread pool.
pub fn collision_check(m: &RationalMechanism, tol: f64) -> Vec<CollisionEvent> {
    let pairs = segment_pairs(m);
    let per_pair: Vec<Vec<CollisionEvent>> = pairs.par_iter().map(|p| pair_events(m, p, tol)).collect();
    let mut events: Vec<CollisionEvent> = per_pair.into_iter().flatten().collect();
    events.sort_by(event_order);
    events
}

/// [`collision_check`] on a dedicated pool of `workers` threads.
pub fn collision_check_with_workers(m: &RationalMechanism, tol: f64, workers: usize) -> Result<Vec<CollisionEvent>> {
    if workers == 0 {
        return Err(Error::InvalidInput("workers must be at least 1".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| collision_check(m, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_rule() {
        use SegmentId::*;
        assert!(shares_joint(4, Joint(1), Link(0)));
        assert!(shares_joint(4, Joint(0), Link(3)));
        assert!(shares_joint(4, Link(0), Link(1)));
        assert!(shares_joint(4, Link(3), Link(0)));
        assert!(!shares_joint(4, Link(0), Link(2)));
        assert!(!shares_joint(4, Joint(0), Joint(1)));
        assert!(!shares_joint(4, Joint(2), Link(0)));
    }

    #[test]
    fn crossing_segments_touch() {
        let p = [Point3::new(-1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)];
        let q = [Point3::new(0.0, -1.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let (x, kind) = contact(&p, &q, 1e-9).unwrap();
        assert_eq!(kind, CollisionKind::SegmentContact);
        assert!(x.norm() < 1e-15);
        let far = [Point3::new(0.0, 2.0, 0.0), Point3::new(0.0, 3.0, 0.0)];
        assert!(contact(&p, &far, 1e-9).is_none());
    }

    #[test]
    fn collinear_overlap() {
        let p = [Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0)];
        let q = [Point3::new(1.0, 0.0, 0.0), Point3::new(3.0, 0.0, 0.0)];
        let (x, kind) = contact(&p, &q, 1e-9).unwrap();
        assert_eq!(kind, CollisionKind::ParallelOverlap);
        assert!((x.x - 1.5).abs() < 1e-12);
        let apart = [Point3::new(0.0, 1.0, 0.0), Point3::new(2.0, 1.0, 0.0)];
        assert!(contact(&apart, &q, 1e-9).is_none());
    }
}
