//! Plane-geometry primitives: points, directed angles, unit vectors,
//! circles and lines.
//!
//! Angles are measured counterclockwise and taken mod 2π. Directed angles
//! are stored reduced to `[0, 2π)` and compared by circular distance.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for geometric residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point or displacement in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise quarter turn, `J v = (-v_y, v_x)`.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, a: f64) -> Vec2 {
        let (s, c) = a.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// `rotate90(v) = J v`.
pub fn rotate90(v: Vec2) -> Vec2 {
    v.rot90()
}

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_2pi(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let r = reduce_2pi(a);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduce an angle mod π to `[-π/2, π/2)`.
pub fn wrap_half_pi(a: f64) -> f64 {
    (a + PI / 2.0).rem_euclid(PI) - PI / 2.0
}

/// Circular distance between two angles mod 2π, in `[0, π]`.
pub fn circular_dist(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Circular distance between two angles mod π, in `[0, π/2]`.
pub fn circular_dist_mod_pi(a: f64, b: f64) -> f64 {
    wrap_half_pi(a - b).abs()
}

/// Unit vector stored by its direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector {
    direction: f64,
}

impl UnitVector {
    pub fn from_angle(direction: f64) -> Self {
        UnitVector {
            direction: reduce_2pi(direction),
        }
    }

    /// Direction of a nonzero vector.
    pub fn from_vec(v: Vec2) -> Result<Self> {
        if v.norm() == 0.0 || !v.is_finite() {
            return Err(Error::InvalidInput("zero or non-finite vector has no direction".into()));
        }
        Ok(Self::from_angle(v.angle()))
    }

    pub fn direction(self) -> f64 {
        self.direction
    }

    pub fn vec(self) -> Vec2 {
        Vec2::from_angle(self.direction)
    }

    pub fn neg(self) -> Self {
        Self::from_angle(self.direction + PI)
    }
}

/// Counterclockwise rotation angle, reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedAngle {
    value: f64,
}

impl DirectedAngle {
    pub fn new(value: f64) -> Self {
        DirectedAngle {
            value: reduce_2pi(value),
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    /// Representative in `(-π, π]`.
    pub fn signed(self) -> f64 {
        wrap_pi(self.value)
    }

    pub fn dist(self, other: DirectedAngle) -> f64 {
        circular_dist(self.value, other.value)
    }
}

/// The angle through which `u` must be rotated counterclockwise to align
/// with `v`.
pub fn angle_between(u: UnitVector, v: UnitVector) -> DirectedAngle {
    DirectedAngle::new(v.direction - u.direction)
}

/// Directed angle between two arbitrary nonzero vectors.
pub fn angle_between_vecs(u: Vec2, v: Vec2) -> DirectedAngle {
    DirectedAngle::new(u.cross(v).atan2(u.dot(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::InvalidInput(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Circle { center, radius })
    }

    /// Power of a point: squared tangent length for exterior points.
    pub fn power(&self, p: Point2) -> f64 {
        (p - self.center).norm_sq() - self.radius * self.radius
    }

    pub fn point_at(&self, angle: f64) -> Point2 {
        self.center + Vec2::from_angle(angle) * self.radius
    }
}

/// A circle carrying an orientation: positive sign means counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedCircle {
    pub center: Point2,
    /// Radius with sign; positive for counterclockwise orientation.
    pub signed_radius: f64,
}

impl OrientedCircle {
    pub fn circle(&self) -> Circle {
        Circle {
            center: self.center,
            radius: self.signed_radius.abs(),
        }
    }

    pub fn sign(&self) -> f64 {
        self.signed_radius.signum()
    }

    /// Oriented unit tangent at a point of the circle.
    pub fn tangent_at(&self, p: Point2) -> Vec2 {
        ((p - self.center) * (1.0 / self.signed_radius)).rot90()
    }
}

/// A line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point2,
    pub direction: Vec2,
}

impl Line {
    pub fn through(point: Point2, direction: Vec2) -> Self {
        Line {
            point,
            direction: direction.normalized(),
        }
    }

    pub fn at(&self, s: f64) -> Point2 {
        self.point + self.direction * s
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.direction.cross(p - self.point)
    }

    pub fn intersect(&self, other: &Line) -> Option<Point2> {
        let den = self.direction.cross(other.direction);
        if den.abs() < 1e-14 {
            return None;
        }
        let s = (other.point - self.point).cross(other.direction) / den;
        Some(self.at(s))
    }
}

/// Residual of the framing condition `∠(u1, B1B2) = ∠(B1B2, u2)` for a pair
/// of points with attached unit vectors.
pub fn framing_pair_residual(b1: Point2, u1: UnitVector, b2: Point2, u2: UnitVector) -> f64 {
    let chord = b2 - b1;
    let phi = chord.angle();
    circular_dist(phi - u1.direction(), u2.direction() - phi)
}

/// The unique circle through `b1` and `b2` tangent to `u1` at `b1` and to
/// `u2` at `b2`.
///
/// The returned signed radius is positive when the circle is traversed
/// counterclockwise in the direction of the vectors. The center is the
/// intersection of the normals at `b1` and `b2`.
pub fn circle_through_point_pair_tangent_to_directions(
    b1: Point2,
    u1: UnitVector,
    b2: Point2,
    u2: UnitVector,
    tol: f64,
) -> Result<OrientedCircle> {
    let chord = b2 - b1;
    let len = chord.norm();
    if len == 0.0 {
        return Err(Error::DegeneratePolygon { index: 0, next: 1 });
    }
    let residual = framing_pair_residual(b1, u1, b2, u2);
    if residual > tol {
        return Err(Error::FramingViolated { residual });
    }
    let v1 = u1.vec();
    let sin_a = v1.cross(chord) / len;
    if sin_a.abs() < tol {
        return Err(Error::DegenerateCircle);
    }
    // center = b1 + s J u1 with |center - b2| = |s|
    let s = len * len / (2.0 * v1.cross(chord));
    let n1 = v1.rot90();
    let center = b1 + n1 * s;
    Ok(OrientedCircle {
        center,
        signed_radius: s,
    })
}

/// Circle through three non-collinear points.
pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Option<Circle> {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    let scale = ab.norm_sq().max(ac.norm_sq());
    if d.abs() <= 1e-14 * scale {
        return None;
    }
    let ux = (ac.y * ab.norm_sq() - ab.y * ac.norm_sq()) / d;
    let uy = (ab.x * ac.norm_sq() - ac.x * ab.norm_sq()) / d;
    let center = a + Vec2::new(ux, uy);
    Some(Circle {
        center,
        radius: center.dist(a),
    })
}

/// Points of tangency on `circle` of the two tangent lines from an exterior
/// point `p`. The first is reached by rotating the direction toward the
/// center by `-acos(r/|p-c|)` around the center, the second by `+acos`.
pub fn tangent_points(circle: &Circle, p: Point2) -> Option<(Point2, Point2)> {
    let d = p - circle.center;
    let l = d.norm();
    if l <= circle.radius {
        return None;
    }
    let beta = d.angle();
    let gamma = (circle.radius / l).acos();
    Some((circle.point_at(beta - gamma), circle.point_at(beta + gamma)))
}
