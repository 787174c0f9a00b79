mod common;

use common::oracle::{dense_sweep, line_distance, sweep_pair, OracleEvent};
use ratlink::collision::{
    collision_check, collision_check_with_workers, intersection_polynomial, pair_events, segment_pairs, shares_joint,
    CollisionEvent, EventRecord, SegmentPair, COLLISION_TOL,
};
use ratlink::design::apply_design_cps;
use ratlink::fixtures::{bennett_curve, six_r_curve, BENNETT_DESIGN_CPS, BENNETT_DESIGN_SCALE};
use ratlink::mechanism::{Curve, CurveParam, RationalMechanism, Segment, SegmentId};
use ratlink::motionpoly::{real_roots, MotionPolynomial};
use ratlink::quatcore::{DualQuaternion, Vec3};

const SAMPLES: usize = 100_000;

fn bennett() -> RationalMechanism {
    RationalMechanism::from_curve(Curve::Exact(bennett_curve())).unwrap()
}

fn designed_bennett() -> RationalMechanism {
    apply_design_cps(&bennett(), &BENNETT_DESIGN_CPS, BENNETT_DESIGN_SCALE).unwrap()
}

fn t_close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-6 * x.abs().max(1.0),
        _ => false,
    }
}

/// Same pairs with matching parameters, in both directions.
fn assert_matches_oracle(events: &[CollisionEvent], oracle: &[OracleEvent]) {
    let mut got: Vec<_> = events.iter().map(|e| (e.pair, e.t.to_f64())).collect();
    got.sort_by(|a, b| a.0.cmp(&b.0));
    let want: Vec<_> = oracle.iter().map(|e| (e.pair, e.t)).collect();
    assert_eq!(got.len(), want.len(), "root events {got:?}\noracle {want:?}");
    for g in &got {
        assert!(want.iter().any(|w| w.0 == g.0 && t_close(w.1, g.1)), "{g:?} missing from oracle {want:?}");
    }
    for w in &want {
        assert!(got.iter().any(|g| w.0 == g.0 && t_close(w.1, g.1)), "{w:?} missing from root events {got:?}");
    }
}

#[test]
fn default_bennett_collides_like_the_oracle() {
    let m = bennett();
    let events = collision_check(&m, COLLISION_TOL);
    assert!(!events.is_empty());
    assert_matches_oracle(&events, &dense_sweep(&m, SAMPLES, COLLISION_TOL));
}

#[test]
fn designed_bennett_is_collision_free() {
    let m = designed_bennett();
    assert!(collision_check(&m, COLLISION_TOL).is_empty());
    assert!(dense_sweep(&m, SAMPLES, COLLISION_TOL).is_empty());
}

#[test]
fn six_r_matches_the_oracle() {
    let m = RationalMechanism::from_curve(Curve::Exact(six_r_curve())).unwrap();
    let events = collision_check(&m, COLLISION_TOL);
    assert_matches_oracle(&events, &dense_sweep(&m, SAMPLES, COLLISION_TOL));
}

#[test]
fn shifted_segments_match_the_oracle() {
    let base = bennett();
    for (k, shift) in [-0.08, -0.03, 0.02, 0.07].into_iter().enumerate() {
        let mut m = base.clone();
        for j in 0..4 {
            let c = m.connection_points()[j];
            let s = shift * if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            m = m.set_connection_points(j, c.cp0 + s, c.cp1 + 0.5 * s).unwrap();
        }
        let events = collision_check(&m, COLLISION_TOL);
        assert_matches_oracle(&events, &dense_sweep(&m, 20_000, COLLISION_TOL));
    }
}

#[test]
fn four_r_has_sixteen_pairs_and_no_adjacent_ones() {
    let m = bennett();
    let pairs = segment_pairs(&m);
    assert_eq!(pairs.len(), 16);
    assert!(pairs.iter().all(|p| !shares_joint(4, p.a.id, p.b.id)));
    for e in collision_check(&m, COLLISION_TOL) {
        assert!(!shares_joint(4, e.pair.0, e.pair.1));
    }
}

#[test]
fn events_are_sorted_and_worker_independent() {
    let m = bennett();
    let one = collision_check_with_workers(&m, COLLISION_TOL, 1).unwrap();
    let eight = collision_check_with_workers(&m, COLLISION_TOL, 8).unwrap();
    assert_eq!(one, eight);
    let keys: Vec<f64> = one.iter().map(|e| e.t.to_f64().unwrap_or(f64::INFINITY)).collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    assert!(collision_check_with_workers(&m, COLLISION_TOL, 0).is_err());
}

#[test]
fn contact_points_lie_on_both_moved_segments() {
    let m = bennett();
    for e in collision_check(&m, COLLISION_TOL) {
        let joints = m.joint_frames_at(&e.t).unwrap();
        let links = m.link_segments_at(&e.t).unwrap();
        let ends = |s: SegmentId| match s {
            SegmentId::Joint(j) => joints[j].segment.clone(),
            SegmentId::Link(l) => links[l].clone(),
        };
        for s in [e.pair.0, e.pair.1] {
            let [p, q] = ends(s);
            let d = common::oracle::segment_distance(&e.point, &e.point, &p, &q);
            assert!(d < 1e-7, "{s} at {:?}: {d}", e.t);
        }
    }
}

#[test]
fn swapped_pair_gives_the_same_events() {
    let m = bennett();
    for p in segment_pairs(&m) {
        let swapped = SegmentPair { a: p.b.clone(), b: p.a.clone(), relative: p.relative.conj() };
        let e1 = pair_events(&m, &p, COLLISION_TOL);
        let e2 = pair_events(&m, &swapped, COLLISION_TOL);
        assert_eq!(e1.len(), e2.len());
        for (x, y) in e1.iter().zip(&e2) {
            assert!(t_close(x.t.to_f64(), y.t.to_f64()));
            assert!((x.point.clone() - y.point.clone()).norm() < 1e-9);
        }
    }
}

#[test]
fn static_skew_segments_never_collide() {
    let seg = |id, ends: [[f64; 3]; 2]| Segment { id, body: 0, ends: ends.map(Vec3::from_array) };
    let pair = SegmentPair {
        a: seg(SegmentId::Joint(0), [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
        b: seg(SegmentId::Joint(2), [[0.0, 1.0, 1.0], [0.0, 1.0, 2.0]]),
        relative: MotionPolynomial::constant(DualQuaternion::identity()),
    };
    let f = intersection_polynomial(&pair);
    assert_eq!(f.degree(), Some(0));
    assert!(f.coeff(0).abs() > 0.5);
    assert!(pair_events(&bennett(), &pair, COLLISION_TOL).is_empty());
}

#[test]
fn coplanarity_roots_match_line_distance_oracle() {
    let m = bennett();
    let pair =
        segment_pairs(&m).into_iter().find(|p| p.a.id == SegmentId::Joint(0) && p.b.id == SegmentId::Joint(2)).unwrap();
    let f = intersection_polynomial(&pair);
    assert!(f.degree().unwrap() <= 2 * 2 * pair.relative.degree().unwrap());
    let roots = real_roots(&f);
    let segs = m.segments();
    let (i, k) =
        (segs.iter().position(|s| s.id == pair.a.id).unwrap(), segs.iter().position(|s| s.id == pair.b.id).unwrap());
    let oracle = sweep_pair(&m, i, k, SAMPLES, COLLISION_TOL, line_distance);
    assert_eq!(roots.len(), oracle.len(), "{roots:?} vs {oracle:?}");
    for o in &oracle {
        let t = o.t.unwrap();
        assert!(roots.iter().any(|r| (r - t).abs() <= 1e-6 * t.abs().max(1.0)), "{t} not in {roots:?}");
    }
}

#[test]
fn report_records_serialize() {
    let events = collision_check(&bennett(), COLLISION_TOL);
    let rec = EventRecord::from(&events[0]);
    let v = serde_json::to_value(&rec).unwrap();
    assert_eq!(v["kind"], "segment-segment");
    assert_eq!(v["pair"].as_array().unwrap().len(), 2);
    assert_eq!(v["point"].as_array().unwrap().len(), 3);
    assert!(v["t"].is_number());
    let inf = CollisionEvent { t: CurveParam::Infinity, ..events[0].clone() };
    assert!(serde_json::to_value(EventRecord::from(&inf)).unwrap()["t"].is_null());
}
