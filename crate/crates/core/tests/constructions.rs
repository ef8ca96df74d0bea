use std::f64::consts::TAU;

use equitangent::constructions::*;
use equitangent::geom::{Circle, Vec2};
use proptest::prelude::*;

fn locus(n: usize) -> (PiecewiseCircularCurve, PolyLine) {
    let c = smooth_regular_ngon(n, DEFAULT_CORNER_RADIUS, DEFAULT_SIDE_RADIUS).unwrap();
    match equitangent_locus(&c).unwrap() {
        EquitangentLocus::Polyline(p) => (c, p),
        EquitangentLocus::WholeExterior => panic!("smoothed polygon is not a circle"),
    }
}

#[test]
fn nonagon_dihedral_symmetry() {
    let c = smooth_regular_ngon(9, 0.05, 20.0).unwrap();
    assert_eq!(c.len(), 18);
    let r = c.rotated(TAU / 9.0);
    for i in 0..18 {
        let a = r.arc(i);
        let b = c.arc(i + 2);
        assert!(a.center.dist(b.center) < 1e-9);
        assert!(a.start_point().dist(b.start_point()) < 1e-9);
        assert!(a.end_point().dist(b.end_point()) < 1e-9);
    }
    // reflection across the x-axis swaps the two arcs adjacent to corner 0
    let a = c.arc(1).start_point();
    let b = c.arc(17).end_point();
    assert!((a.x - b.x).abs() < 1e-9 && (a.y + b.y).abs() < 1e-9);
}

#[test]
fn octagon_locus_is_equitangent() {
    let (c, g) = locus(8);
    assert_eq!(g.segments.len(), 16);
    assert!(g.closure_gap() < 1e-12);
    let mut worst: f64 = 0.0;
    for x in g.sample(1000) {
        let t = tangent_segment_lengths(&c, x).unwrap();
        worst = worst.max((t.l1 - t.l2).abs());
    }
    assert!(worst < 1e-8, "asymmetry {worst}");
    assert!(nesting_margin(&c, &g, 32) > 0.0);
}

#[test]
fn locus_vertices_see_joints() {
    let (c, g) = locus(8);
    for v in g.vertices() {
        let t = tangent_segment_lengths(&c, v).unwrap();
        assert!(t.at_joint);
        assert!((t.l1 - t.l2).abs() < 1e-8);
    }
}

#[test]
fn nonagon_locus_symmetry() {
    let (c, g) = locus(9);
    assert_eq!(g.segments.len(), 18);
    let v = g.vertices();
    for i in 0..18 {
        let rotated = v[i].rotate(TAU / 9.0);
        assert!(rotated.dist(v[(i + 2) % 18]) < 1e-9);
    }
    assert!(nesting_margin(&c, &g, 32) > 0.0);
}

#[test]
fn segments_lie_on_radical_axes() {
    let (c, g) = locus(7);
    for s in &g.segments {
        let (a, b) = (c.arc(s.arcs.0).circle(), c.arc(s.arcs.1).circle());
        for k in 0..=10 {
            let p = s.start + (s.end - s.start) * (k as f64 / 10.0);
            // power differences cancel against the squared distance to the far center
            let scale = (p - a.center).norm_sq().max((p - b.center).norm_sq());
            assert!((a.power(p) - b.power(p)).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn schedule_returns_to_start() {
    for n in 7..=12 {
        let s = chord_schedule(n).unwrap();
        assert_eq!(s.len(), 2 * n);
        for st in &s {
            assert!(schedule_framing_residual(n, st) < 1e-10);
        }
        // consecutive states change exactly one chord endpoint and one support
        for i in 0..s.len() {
            let (a, b) = (s[i], s[(i + 1) % s.len()]);
            let moved = (a.chord.0 != b.chord.0) as u8 + (a.chord.1 != b.chord.1) as u8;
            let turned = (a.support_first != b.support_first) as u8 + (a.support_second != b.support_second) as u8;
            assert_eq!((moved, turned), (1, 1));
        }
    }
}

#[test]
fn axis_point_is_symmetric() {
    let c = smooth_regular_ngon(8, 0.05, 20.0).unwrap();
    // the x-axis is a mirror line through vertex 0
    let t = tangent_segment_lengths(&c, Vec2::new(3.0, 0.0)).unwrap();
    assert!((t.l1 - t.l2).abs() < 1e-10);
    assert!(tangent_segment_lengths(&c, Vec2::new(0.2, 0.1)).is_err());
}

proptest! {
    #[test]
    fn radical_axis_equal_power(
        x1 in -5.0..5.0f64, y1 in -5.0..5.0f64, r1 in 0.1..3.0f64,
        x2 in -5.0..5.0f64, y2 in -5.0..5.0f64, r2 in 0.1..3.0f64,
        s in -10.0..10.0f64,
    ) {
        let a = Circle::new(Vec2::new(x1, y1), r1).unwrap();
        let b = Circle::new(Vec2::new(x2, y2), r2).unwrap();
        prop_assume!(a.center.dist(b.center) > 0.1);
        let l = radical_axis(&a, &b).unwrap();
        let p = l.at(s);
        let scale = p.norm_sq().max(a.center.norm_sq()).max(b.center.norm_sq()).max(1.0);
        prop_assert!((a.power(p) - b.power(p)).abs() < 1e-12 * scale);
    }

    #[test]
    fn smoothing_is_c1(n in 7usize..16, rc in 0.005..0.1f64, rs in 5.0..200.0f64) {
        let c = smooth_regular_ngon(n, rc, rs).unwrap();
        prop_assert_eq!(c.len(), 2 * n);
        prop_assert!(c.c1_residual() < 1e-9);
    }
}
