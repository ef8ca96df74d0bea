//! Piecewise-circular smoothings of regular polygons and their equitangent
//! loci.
//!
//! Arcs of a [`PiecewiseCircularCurve`] are traversed counterclockwise. For a
//! smoothed regular `n`-gon, arc `2k` is the corner arc at vertex `k` and arc
//! `2k + 1` is the side arc between vertices `k` and `k + 1`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{framing_pair_residual, reduce_2pi, wrap_pi, Circle, Line, Point2, UnitVector, Vec2};

pub const DEFAULT_CORNER_RADIUS: f64 = 0.02;
pub const DEFAULT_SIDE_RADIUS: f64 = 100.0;
/// Tolerance for C¹ joints and for angular span membership.
pub const JOINT_TOL: f64 = 1e-9;

/// Counterclockwise arc from `start_angle` to `end_angle > start_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Point2,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl Arc {
    pub fn circle(&self) -> Circle {
        Circle {
            center: self.center,
            radius: self.radius,
        }
    }

    pub fn sweep(&self) -> f64 {
        self.end_angle - self.start_angle
    }

    pub fn start_point(&self) -> Point2 {
        self.circle().point_at(self.start_angle)
    }

    pub fn end_point(&self) -> Point2 {
        self.circle().point_at(self.end_angle)
    }

    /// Point at fraction `s ∈ [0, 1]` of the sweep.
    pub fn point(&self, s: f64) -> Point2 {
        self.circle().point_at(self.start_angle + s * self.sweep())
    }

    /// Unit tangent in the direction of traversal at angle `a`.
    pub fn tangent(&self, a: f64) -> Vec2 {
        Vec2::from_angle(a).rot90()
    }

    /// Signed angular offset of `a` past the start, and whether it falls in
    /// the span up to `tol` (measured in arc length).
    fn locate(&self, a: f64) -> (f64, bool) {
        let off = reduce_2pi(a - self.start_angle);
        // a full circle contains every angle
        if self.sweep() >= TAU - 1e-15 {
            return (off, true);
        }
        let slack = tol_angle(self.radius);
        let inside = off <= self.sweep() + slack || off >= TAU - slack;
        (off, inside)
    }
}

fn tol_angle(radius: f64) -> f64 {
    JOINT_TOL / radius.max(1e-300)
}

/// Closed C¹ curve made of counterclockwise circular arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCircularCurve {
    arcs: Vec<Arc>,
}

impl PiecewiseCircularCurve {
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidInput("curve needs at least one arc".into()));
        }
        for (i, a) in arcs.iter().enumerate() {
            if !(a.radius > 0.0) || !a.center.is_finite() || !(a.sweep() > 0.0) || a.sweep() > TAU + 1e-12 {
                return Err(Error::InvalidInput(format!("arc {i} must have positive radius and sweep in (0, 2π]")));
            }
        }
        let curve = PiecewiseCircularCurve { arcs };
        let res = curve.c1_residual();
        if res > JOINT_TOL {
            return Err(Error::InvalidInput(format!("arcs do not join C¹ (residual {res:.3e})")));
        }
        let turning: f64 = curve.arcs.iter().map(Arc::sweep).sum();
        if (turning - TAU).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("total turning {turning} is not 2π")));
        }
        Ok(curve)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arc(&self, i: usize) -> &Arc {
        &self.arcs[i % self.arcs.len()]
    }

    /// Worst joint mismatch: point distance plus tangent direction
    /// difference, over all joints.
    pub fn c1_residual(&self) -> f64 {
        let m = self.arcs.len();
        (0..m)
            .map(|i| {
                let a = &self.arcs[i];
                let b = &self.arcs[(i + 1) % m];
                let dp = a.end_point().dist(b.start_point());
                let dt = wrap_pi(b.start_angle - a.end_angle).abs();
                dp + dt
            })
            .fold(0.0, f64::max)
    }

    /// Endpoint of arc `i`, shared with the start of arc `i + 1`.
    pub fn joint(&self, i: usize) -> Point2 {
        self.arc(i).end_point()
    }

    /// Tangent line at joint `i`.
    pub fn joint_tangent(&self, i: usize) -> Line {
        let a = self.arc(i);
        Line::through(a.end_point(), a.tangent(a.end_angle))
    }

    /// `per_arc` points on each arc, starting at each arc's start.
    pub fn sample(&self, per_arc: usize) -> Vec<Point2> {
        let per_arc = per_arc.max(1);
        self.arcs
            .iter()
            .flat_map(|a| (0..per_arc).map(move |k| a.point(k as f64 / per_arc as f64)))
            .collect()
    }

    /// True if all arcs lie on one circle.
    pub fn is_circle(&self) -> bool {
        let a0 = &self.arcs[0];
        self.arcs
            .iter()
            .all(|a| a.center.dist(a0.center) <= JOINT_TOL && (a.radius - a0.radius).abs() <= JOINT_TOL)
    }

    /// Image under rotation by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        PiecewiseCircularCurve {
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    center: a.center.rotate(angle),
                    radius: a.radius,
                    start_angle: a.start_angle + angle,
                    end_angle: a.end_angle + angle,
                })
                .collect(),
        }
    }
}

/// Smooths the regular `n`-gon inscribed in the unit circle: each vertex is
/// replaced by an arc of radius `corner_radius` and each side by an arc of
/// radius `side_radius`.
pub fn smooth_regular_ngon(n: usize, corner_radius: f64, side_radius: f64) -> Result<PiecewiseCircularCurve> {
    if n < 7 {
        return Err(Error::UnsupportedN {
            n,
            reason: "the smoothing construction needs n >= 7",
        });
    }
    let (rc, rs) = (corner_radius, side_radius);
    if !(rc > 0.0 && rc < 1.0 && rs.is_finite() && rs > rc) {
        return Err(Error::InfeasibleRadii(format!(
            "need 0 < corner radius < 1 and side radius > corner radius, got {rc} and {rs}"
        )));
    }
    let h = PI / n as f64;
    let cv = 1.0 - rc;
    let disc = (rs - rc).powi(2) - (cv * h.sin()).powi(2);
    if disc <= 0.0 {
        return Err(Error::InfeasibleRadii(format!("side radius {rs} too small to reach the corner arcs")));
    }
    // side circle k has center −t n̂_k and is internally tangent to both
    // neighbouring corner circles
    let t = -cv * h.cos() + disc.sqrt();
    let corner_center = |k: usize| Vec2::from_angle(2.0 * h * k as f64) * cv;
    let side_center = |k: usize| Vec2::from_angle(2.0 * h * k as f64 + h) * (-t);

    let mut arcs = Vec::with_capacity(2 * n);
    for k in 0..n {
        let c = corner_center(k);
        let before = (c - side_center((k + n - 1) % n)).angle();
        let after = (c - side_center(k)).angle();
        let sweep = reduce_2pi(after - before);
        if !(sweep > 0.0 && sweep < PI) {
            return Err(Error::InfeasibleRadii(format!("corner arc {k} has sweep {sweep}")));
        }
        arcs.push(Arc {
            center: c,
            radius: rc,
            start_angle: before,
            end_angle: before + sweep,
        });
        let s = side_center(k);
        let start = (c - s).angle();
        let end = (corner_center((k + 1) % n) - s).angle();
        let sweep = reduce_2pi(end - start);
        if !(sweep > 0.0 && sweep < PI) {
            return Err(Error::InfeasibleRadii(format!("side arc {k} has sweep {sweep}")));
        }
        arcs.push(Arc {
            center: s,
            radius: rs,
            start_angle: start,
            end_angle: start + sweep,
        });
    }
    PiecewiseCircularCurve::new(arcs).map_err(|e| Error::InfeasibleRadii(e.to_string()))
}

/// Tangent segments from an exterior point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentSegments {
    /// Length to the touch point on the right, seen from the point.
    pub l1: f64,
    /// Length to the touch point on the left.
    pub l2: f64,
    pub touch1: Point2,
    pub touch2: Point2,
    /// Some touch point lies within tolerance of an arc joint.
    pub at_joint: bool,
}

/// Lengths of the two tangent segments from `x` to the curve, found arc by
/// arc: tangents from `x` to each arc's circle are kept when the touch point
/// lies in the arc's angular span.
pub fn tangent_segment_lengths(curve: &PiecewiseCircularCurve, x: Point2) -> Result<TangentSegments> {
    struct Touch {
        point: Point2,
        direction: f64,
        at_joint: bool,
    }
    let mut touches: Vec<Touch> = Vec::new();
    for arc in curve.arcs() {
        let Some((p, q)) = crate::geom::tangent_points(&arc.circle(), x) else {
            continue;
        };
        for t in [p, q] {
            let (off, inside) = arc.locate((t - arc.center).angle());
            if !inside {
                continue;
            }
            let slack = 1e3 * tol_angle(arc.radius);
            let full = arc.sweep() >= TAU - 1e-15;
            let at_joint = !full && (off <= slack || off >= TAU - slack || (off - arc.sweep()).abs() <= slack);
            let direction = (t - x).angle();
            match touches
                .iter_mut()
                .find(|s| wrap_pi(s.direction - direction).abs() < 1e-7)
            {
                Some(s) => s.at_joint |= at_joint,
                None => touches.push(Touch {
                    point: t,
                    direction,
                    at_joint,
                }),
            }
        }
    }
    if touches.len() != 2 {
        return Err(Error::PointInside);
    }
    let (a, b) = (&touches[0], &touches[1]);
    // the right-hand touch point has the smaller direction angle
    let (right, left) = if wrap_pi(b.direction - a.direction) > 0.0 {
        (a, b)
    } else {
        (b, a)
    };
    Ok(TangentSegments {
        l1: right.point.dist(x),
        l2: left.point.dist(x),
        touch1: right.point,
        touch2: left.point,
        at_joint: a.at_joint || b.at_joint,
    })
}

/// Line of points with equal power with respect to both circles.
pub fn radical_axis(c1: &Circle, c2: &Circle) -> Result<Line> {
    let delta = c2.center - c1.center;
    let d = delta.norm();
    let scale = c1.radius.max(c2.radius).max(1.0);
    if d <= 1e-14 * scale {
        return Err(Error::ConcentricCircles);
    }
    let u = delta * (1.0 / d);
    let a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    Ok(Line {
        point: c1.center + u * a,
        direction: u.rot90(),
    })
}

/// Position of a framed 2-gon on the regular `n`-gon: a chord between two
/// vertices and a support line (a side) at each end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChordState {
    pub chord: (usize, usize),
    /// Side index `s` is the side from vertex `s` to vertex `s + 1`.
    pub support_first: usize,
    pub support_second: usize,
}

/// The alternating schedule of `2n` chord states. Moving from state `m` to
/// state `m + 1` slides one endpoint along its support side while the other
/// endpoint stays at a vertex and its support line turns; the last state
/// moves back to the first.
pub fn chord_schedule(n: usize) -> Result<Vec<ChordState>> {
    if n < 7 {
        return Err(Error::UnsupportedN {
            n,
            reason: "the chord schedule needs n >= 7",
        });
    }
    let states: Vec<ChordState> = (0..n)
        .flat_map(|a| {
            [
                ChordState {
                    chord: (a, (a + 3) % n),
                    support_first: a,
                    support_second: (a + 2) % n,
                },
                ChordState {
                    chord: ((a + 1) % n, (a + 3) % n),
                    support_first: a,
                    support_second: (a + 3) % n,
                },
            ]
        })
        .collect();
    let worst = states
        .iter()
        .map(|s| schedule_framing_residual(n, s))
        .fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::FramingViolated { residual: worst });
    }
    Ok(states)
}

/// Framing residual of a chord state on the regular `n`-gon inscribed in
/// the unit circle, with sides oriented counterclockwise.
pub fn schedule_framing_residual(n: usize, s: &ChordState) -> f64 {
    let vertex = |k: usize| Vec2::from_angle(TAU * k as f64 / n as f64);
    let side = |k: usize| UnitVector::from_angle((vertex((k + 1) % n) - vertex(k)).angle());
    framing_pair_residual(vertex(s.chord.0), side(s.support_first), vertex(s.chord.1), side(s.support_second))
}

/// Arc touched at a chord endpoint: the corner arc of a vertex when the
/// endpoint stays put, the side arc along which it slides otherwise.
fn move_arc(v_before: usize, v_after: usize, side: usize) -> usize {
    if v_before == v_after {
        2 * v_before
    } else {
        2 * side + 1
    }
}

/// Joint between the corner arc at `vertex` and the arc of the adjacent
/// `side`.
fn corner_joint(n: usize, vertex: usize, side: usize) -> usize {
    if side == vertex {
        2 * vertex
    } else {
        (2 * vertex + 2 * n - 1) % (2 * n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: Point2,
    pub end: Point2,
    /// Arcs touched by the two tangent segments from points of this segment.
    pub arcs: (usize, usize),
}

/// Polygonal line given by its segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyLine {
    pub segments: Vec<Segment>,
}

impl PolyLine {
    pub fn vertices(&self) -> Vec<Point2> {
        self.segments.iter().map(|s| s.start).collect()
    }

    /// Largest gap between the end of a segment and the start of the next.
    pub fn closure_gap(&self) -> f64 {
        let m = self.segments.len();
        (0..m)
            .map(|i| self.segments[i].end.dist(self.segments[(i + 1) % m].start))
            .fold(0.0, f64::max)
    }

    /// `samples` points spread evenly over the segments.
    pub fn sample(&self, samples: usize) -> Vec<Point2> {
        let m = self.segments.len();
        (0..samples)
            .map(|k| {
                let u = k as f64 * m as f64 / samples as f64;
                let i = (u.floor() as usize).min(m - 1);
                let s = &self.segments[i];
                let f = u - i as f64;
                s.start + (s.end - s.start) * f
            })
            .collect()
    }

    /// Winding number of the closed polyline around `p`.
    pub fn winding_number(&self, p: Point2) -> i64 {
        let total: f64 = self
            .segments
            .iter()
            .map(|s| wrap_pi((s.end - p).angle() - (s.start - p).angle()))
            .sum();
        (total / TAU).round() as i64
    }

    /// Smallest distance from `p` to the polyline.
    pub fn distance(&self, p: Point2) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let d = s.end - s.start;
                let l2 = d.norm_sq();
                let f = if l2 > 0.0 { ((p - s.start).dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
                p.dist(s.start + d * f)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EquitangentLocus {
    /// The curve is a circle: every exterior point is equitangent.
    WholeExterior,
    Polyline(PolyLine),
}

/// Assembles the outer curve Γ of a smoothed regular `n`-gon. Its vertices
/// are the intersections of the tangent lines at the two joints touched by
/// each chord state of the schedule; between consecutive states Γ runs
/// along the radical axis of the two arcs the moving chord touches.
pub fn equitangent_locus(curve: &PiecewiseCircularCurve) -> Result<EquitangentLocus> {
    if curve.is_circle() {
        return Ok(EquitangentLocus::WholeExterior);
    }
    if curve.len() % 2 == 1 {
        return Err(Error::InvalidInput(
            "expected alternating corner and side arcs (an even number of arcs)".into(),
        ));
    }
    let n = curve.len() / 2;
    let schedule = chord_schedule(n)?;
    let vertex_of = |s: &ChordState| -> Result<Point2> {
        let l1 = curve.joint_tangent(corner_joint(n, s.chord.0, s.support_first));
        let l2 = curve.joint_tangent(corner_joint(n, s.chord.1, s.support_second));
        l1.intersect(&l2)
            .ok_or_else(|| Error::Numerical("parallel joint tangents".into()))
    };
    let m = schedule.len();
    let mut segments = Vec::with_capacity(m);
    for i in 0..m {
        let s = &schedule[i];
        let t = &schedule[(i + 1) % m];
        let arcs = (
            move_arc(s.chord.0, t.chord.0, s.support_first),
            move_arc(s.chord.1, t.chord.1, s.support_second),
        );
        let start = vertex_of(s)?;
        let end = vertex_of(t)?;
        let axis = radical_axis(&curve.arc(arcs.0).circle(), &curve.arc(arcs.1).circle())?;
        let scale = start.norm().max(1.0);
        let off = axis.signed_distance(start).abs().max(axis.signed_distance(end).abs());
        if off > 1e-9 * scale {
            return Err(Error::Numerical(format!(
                "locus vertex {i} is {off:.3e} off the radical axis of arcs {arcs:?}"
            )));
        }
        // visibility: the tangents from the segment midpoint must touch the
        // paired arcs inside their spans
        let mid = (start + end) * 0.5;
        let touch = tangent_segment_lengths(curve, mid)?;
        let on = |k: usize, p: Point2| {
            let a = curve.arc(k);
            (p.dist(a.center) - a.radius).abs() < 1e-9 * a.radius.max(1.0)
                && a.locate((p - a.center).angle()).1
        };
        let paired = [touch.touch1, touch.touch2]
            .iter()
            .all(|&p| on(arcs.0, p) || on(arcs.1, p));
        if !paired {
            return Err(Error::Precondition(format!(
                "locus segment {i} does not see arcs {arcs:?}; radii too far from the polygon"
            )));
        }
        segments.push(Segment { start, end, arcs });
    }
    Ok(EquitangentLocus::Polyline(PolyLine { segments }))
}

/// Smallest margin by which the sampled curve lies inside Γ; negative or
/// zero if some sample is outside or on Γ.
pub fn nesting_margin(curve: &PiecewiseCircularCurve, locus: &PolyLine, per_arc: usize) -> f64 {
    curve
        .sample(per_arc)
        .iter()
        .map(|&p| {
            if locus.winding_number(p) == 0 {
                -locus.distance(p)
            } else {
                locus.distance(p)
            }
        })
        .fold(f64::INFINITY, f64::min)
}
