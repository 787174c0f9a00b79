//! Dense-sweep collision oracle: samples the drive angle uniformly, moves
//! every segment with 4×4 matrices and refines local minima of the
//! segment-segment distance by ternary search.

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use ratlink::mechanism::{RationalMechanism, SegmentId};
use ratlink::quatcore::Vec3;

use super::{apply_matrix, chain_matrix};

#[derive(Clone, Debug)]
pub struct OracleEvent {
    pub angle: f64,
    /// `None` at the home configuration (angle 0).
    pub t: Option<f64>,
    pub pair: (SegmentId, SegmentId),
    pub distance: f64,
}

/// Curve parameter of a drive angle, from the first factor of branch `a`.
pub fn angle_to_t(m: &RationalMechanism, angle: f64) -> Option<f64> {
    let phi = angle.rem_euclid(TAU);
    if phi == 0.0 {
        return None;
    }
    let h = &m.branch_a().factors[0].h;
    let r = h.primal.vector().norm();
    Some(h.primal.w + r / (phi / 2.0).tan())
}

fn body_matrix(m: &RationalMechanism, body: usize, angle: f64) -> Matrix4<f64> {
    match angle_to_t(m, angle) {
        None => Matrix4::identity(),
        Some(t) => chain_matrix(m.link_factors(body), t),
    }
}

fn touched(n: usize, s: SegmentId) -> Vec<usize> {
    match s {
        SegmentId::Joint(j) => vec![j],
        SegmentId::Link(l) => vec![l, (l + 1) % n],
    }
}

/// Pairs checked by the oracle: everything except a link with a joint or
/// link on one of its own axes.
pub fn oracle_pairs(m: &RationalMechanism) -> Vec<(usize, usize)> {
    let segs = m.segments();
    let n = m.joint_count();
    let mut out = Vec::new();
    for i in 0..segs.len() {
        for k in i + 1..segs.len() {
            let (a, b) = (segs[i].id, segs[k].id);
            let both_joints = matches!((a, b), (SegmentId::Joint(_), SegmentId::Joint(_)));
            let ta = touched(n, a);
            let adjacent = touched(n, b).iter().any(|j| ta.contains(j));
            if both_joints || !adjacent {
                out.push((i, k));
            }
        }
    }
    out
}

/// Closest distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance(p0: &Vec3<f64>, p1: &Vec3<f64>, q0: &Vec3<f64>, q1: &Vec3<f64>) -> f64 {
    let d1 = p1.clone() - p0.clone();
    let d2 = q1.clone() - q0.clone();
    let r = p0.clone() - q0.clone();
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let den = a * e - b * b;
    let mut s = if den > 1e-300 { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
    let mut u = (b * s + f) / e;
    if u < 0.0 {
        u = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if u > 1.0 {
        u = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    let x = p0.clone() + d1.scale(&s);
    let y = q0.clone() + d2.scale(&u);
    (x - y).norm()
}

/// Distance of two infinite lines, each given by two points.
pub fn line_distance(p0: &Vec3<f64>, p1: &Vec3<f64>, q0: &Vec3<f64>, q1: &Vec3<f64>) -> f64 {
    let d1 = p1.clone() - p0.clone();
    let d2 = q1.clone() - q0.clone();
    let n = d1.cross(&d2);
    let w = q0.clone() - p0.clone();
    if n.norm() < 1e-12 * d1.norm() * d2.norm() {
        return w.cross(&d1).norm() / d1.norm();
    }
    w.dot(&n).abs() / n.norm()
}

type Metric = fn(&Vec3<f64>, &Vec3<f64>, &Vec3<f64>, &Vec3<f64>) -> f64;

fn pair_distance(m: &RationalMechanism, i: usize, k: usize, angle: f64, metric: Metric) -> f64 {
    let segs = m.segments();
    let (a, b) = (&segs[i], &segs[k]);
    let ma = body_matrix(m, a.body, angle);
    let mb = body_matrix(m, b.body, angle);
    let pa: Vec<Vec3<f64>> = a.ends.iter().map(|p| apply_matrix(&ma, p)).collect();
    let pb: Vec<Vec3<f64>> = b.ends.iter().map(|p| apply_matrix(&mb, p)).collect();
    metric(&pa[0], &pa[1], &pb[0], &pb[1])
}

fn refine(m: &RationalMechanism, i: usize, k: usize, lo: f64, hi: f64, metric: Metric) -> (f64, f64) {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if pair_distance(m, i, k, a, metric) <= pair_distance(m, i, k, b, metric) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let x = 0.5 * (lo + hi);
    (x.rem_euclid(TAU), pair_distance(m, i, k, x, metric))
}

/// Sweep of one pair: every local distance minimum below `tol`.
pub fn sweep_pair(
    m: &RationalMechanism,
    i: usize,
    k: usize,
    samples: usize,
    tol: f64,
    metric: Metric,
) -> Vec<OracleEvent> {
    let step = TAU / samples as f64;
    let segs = m.segments();
    let bodies = [segs[i].body, segs[k].body];
    let ends: Vec<Vec3<f64>> = segs[i].ends.iter().chain(segs[k].ends.iter()).cloned().collect();
    let dist: Vec<f64> = (0..samples)
        .map(|s| {
            let angle = s as f64 * step;
            let ma = body_matrix(m, bodies[0], angle);
            let mb = body_matrix(m, bodies[1], angle);
            let p: Vec<Vec3<f64>> =
                ends.iter().enumerate().map(|(j, e)| apply_matrix(if j < 2 { &ma } else { &mb }, e)).collect();
            metric(&p[0], &p[1], &p[2], &p[3])
        })
        .collect();
    let scale = dist.iter().cloned().fold(0.0, f64::max).max(1e-3);
    let mut out: Vec<OracleEvent> = Vec::new();
    let low = dist.iter().cloned().fold(f64::INFINITY, f64::min);
    if scale - low <= 1e-12 * scale {
        // no relative motion: one check suffices
        if low < tol {
            let angle = std::f64::consts::PI;
            out.push(OracleEvent { angle, t: angle_to_t(m, angle), pair: (segs[i].id, segs[k].id), distance: low });
        }
        return out;
    }
    for s in 0..samples {
        let prev = dist[(s + samples - 1) % samples];
        let next = dist[(s + 1) % samples];
        if !(dist[s] <= prev && dist[s] <= next) || dist[s] > 0.05 * scale {
            continue;
        }
        let centre = s as f64 * step;
        let (angle, d) = refine(m, i, k, centre - step, centre + step, metric);
        if d < tol && !out.iter().any(|e| (e.angle - angle).abs() < 1e-9) {
            out.push(OracleEvent { angle, t: angle_to_t(m, angle), pair: (segs[i].id, segs[k].id), distance: d });
        }
    }
    out
}

/// Oracle collision list over all pairs, sorted by pair then angle.
pub fn dense_sweep(m: &RationalMechanism, samples: usize, tol: f64) -> Vec<OracleEvent> {
    let mut out: Vec<OracleEvent> =
        oracle_pairs(m).into_iter().flat_map(|(i, k)| sweep_pair(m, i, k, samples, tol, segment_distance)).collect();
    out.sort_by(|a, b| a.pair.cmp(&b.pair).then(a.angle.total_cmp(&b.angle)));
    out
}
