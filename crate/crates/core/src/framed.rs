//! Polygons with framings: unit vectors at the vertices making equal angles
//! with each side from both of its ends.
//!
//! Vertices are indexed from 0 in code. Parities in the framing formulas
//! refer to the usual 1-based labels, so "odd" vertices are those at even
//! 0-based positions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{circular_dist, circumcircle, reduce_2pi, wrap_half_pi, wrap_pi, Point2, UnitVector, Vec2};

/// Default tolerance for the framing condition.
pub const FRAMING_TOL: f64 = 1e-9;

/// Tolerance on the normalized tangency defect used by [`is_generic`].
pub const GENERIC_TOL: f64 = 1e-7;

/// A closed polygon with no two consecutive vertices equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("polygon needs at least 2 vertices, got {n}")));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("vertex {i} is not finite")));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i] == vertices[j] {
                return Err(Error::DegeneratePolygon { index: i, next: j });
            }
        }
        Ok(Polygon { vertices })
    }

    /// Vertices `(cos a_k, sin a_k)` on the unit circle.
    pub fn on_unit_circle(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| Vec2::from_angle(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.len()]
    }

    /// Side `B_i B_{i+1}` as a vector.
    pub fn side(&self, i: usize) -> Vec2 {
        self.vertex(i + 1) - self.vertex(i)
    }
}

/// Side directions `φ_i` (direction of `B_i B_{i+1}`, in `[0, 2π)`) and
/// exterior angles `θ_i = φ_i − φ_{i−1}` in `(−π, π]`.
pub fn side_data(p: &Polygon) -> (Vec<f64>, Vec<f64>) {
    let n = p.len();
    let phi: Vec<f64> = (0..n).map(|i| reduce_2pi(p.side(i).angle())).collect();
    let theta = (0..n).map(|i| wrap_pi(phi[i] - phi[(i + n - 1) % n])).collect();
    (phi, theta)
}

/// A polygon together with a framing.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedPolygon {
    polygon: Polygon,
    framing: Vec<UnitVector>,
}

impl FramedPolygon {
    /// Validates the framing condition at every side within `tol`.
    pub fn new(polygon: Polygon, directions: &[f64], tol: f64) -> Result<Self> {
        if directions.len() != polygon.len() {
            return Err(Error::InvalidInput(format!(
                "{} framing directions for {} vertices",
                directions.len(),
                polygon.len()
            )));
        }
        if directions.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("framing direction is not finite".into()));
        }
        let fp = FramedPolygon {
            polygon,
            framing: directions.iter().map(|&a| UnitVector::from_angle(a)).collect(),
        };
        let residual = fp.max_residual();
        if residual > tol {
            return Err(Error::FramingViolated { residual });
        }
        Ok(fp)
    }

    pub(crate) fn new_unchecked(polygon: Polygon, framing: Vec<UnitVector>) -> Self {
        FramedPolygon { polygon, framing }
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn len(&self) -> usize {
        self.polygon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygon.is_empty()
    }

    pub fn framing(&self) -> &[UnitVector] {
        &self.framing
    }

    pub fn directions(&self) -> Vec<f64> {
        self.framing.iter().map(|u| u.direction()).collect()
    }

    pub fn u(&self, i: usize) -> UnitVector {
        self.framing[i % self.len()]
    }

    /// Residual of `∠(u_i, B_iB_{i+1}) = ∠(B_iB_{i+1}, u_{i+1})` at side `i`.
    pub fn residual(&self, i: usize) -> f64 {
        let phi = self.polygon.side(i).angle();
        circular_dist(phi - self.u(i).direction(), self.u(i + 1).direction() - phi)
    }

    pub fn residuals(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.residual(i)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }

    /// The framing `(−u_i)`.
    pub fn flipped(&self) -> Self {
        FramedPolygon {
            polygon: self.polygon.clone(),
            framing: self.framing.iter().map(|u| u.neg()).collect(),
        }
    }
}

fn check_odd(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::EvenOrder { n });
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    Ok(())
}

/// The framing of an odd polygon, `α_i = Σ_j (−1)^j φ_{i+j}`.
pub fn compute_framing_odd(p: &Polygon) -> Result<FramedPolygon> {
    let n = p.len();
    check_odd(n)?;
    let (phi, _) = side_data(p);
    let framing = (0..n)
        .map(|i| {
            let a: f64 = (0..n)
                .map(|j| if j % 2 == 0 { phi[(i + j) % n] } else { -phi[(i + j) % n] })
                .sum();
            UnitVector::from_angle(a)
        })
        .collect();
    Ok(FramedPolygon::new_unchecked(p.clone(), framing))
}

/// `Σ θ_i` over the odd-labelled vertices, reduced mod π to `[−π/2, π/2)`.
pub fn framing_obstruction_even(p: &Polygon) -> Result<f64> {
    let n = p.len();
    if n % 2 == 1 {
        return Err(Error::OddOrder { n });
    }
    let (_, theta) = side_data(p);
    let s: f64 = theta.iter().step_by(2).sum();
    Ok(wrap_half_pi(s))
}

/// Base framing direction at the first vertex: the tangent of the circle
/// through the vertex and its two neighbours, or the normal to the first
/// side when that circle does not exist.
fn base_direction(p: &Polygon) -> f64 {
    let n = p.len();
    let (prev, b0, next) = (p.vertex(n - 1), p.vertex(0), p.vertex(1));
    match circumcircle(prev, b0, next) {
        Some(c) if n > 2 => (b0 - c.center).rot90().angle(),
        _ => p.side(0).angle() + PI / 2.0,
    }
}

/// The one-parameter family of framings of an even polygon.
///
/// At `s = 0` the framing starts from the circumcircle tangent at the
/// first vertex (so cyclic polygons get their circle tangents). Changing
/// `s` adds `s` at even-labelled vertices and subtracts it at odd ones.
pub fn framing_family_even(p: &Polygon, s: f64, tol: f64) -> Result<FramedPolygon> {
    let n = p.len();
    let obstruction = framing_obstruction_even(p)?;
    if obstruction.abs() > tol {
        return Err(Error::NoFraming { obstruction });
    }
    let (phi, _) = side_data(p);
    let mut alpha = vec![0.0; n];
    alpha[0] = base_direction(p);
    for k in 0..n - 1 {
        alpha[k + 1] = 2.0 * phi[k] - alpha[k];
    }
    let framing = alpha
        .iter()
        .enumerate()
        .map(|(k, &a)| UnitVector::from_angle(if k % 2 == 1 { a + s } else { a - s }))
        .collect();
    Ok(FramedPolygon::new_unchecked(p.clone(), framing))
}

/// Framing of any polygon: the unique one for odd `n`, the `s = 0` member
/// of the family for even `n`.
pub fn compute_framing(p: &Polygon, tol: f64) -> Result<FramedPolygon> {
    if p.len() % 2 == 1 {
        compute_framing_odd(p)
    } else {
        framing_family_even(p, 0.0, tol)
    }
}

fn tangent_defect(center: Option<Point2>, line_dir: Vec2, b: Point2, u: UnitVector) -> f64 {
    match center {
        Some(c) => {
            let radial = (b - c).normalized();
            radial.dot(u.vec()).abs()
        }
        None => line_dir.cross(u.vec()).abs(),
    }
}

/// A framed polygon is non-generic if at some vertex the framing vectors
/// `u_{i−1}, u_i, u_{i+1}` are all tangent to the circle through
/// `B_{i−1}, B_i, B_{i+1}`. When those vertices are collinear the circle is
/// replaced by their line.
pub fn is_generic(fp: &FramedPolygon) -> bool {
    is_generic_with_tol(fp, GENERIC_TOL)
}

pub fn is_generic_with_tol(fp: &FramedPolygon, tol: f64) -> bool {
    let n = fp.len();
    if n < 3 {
        return false;
    }
    let p = fp.polygon();
    for i in 0..n {
        let idx = [(i + n - 1) % n, i, (i + 1) % n];
        let pts = idx.map(|k| p.vertex(k));
        let center = circumcircle(pts[0], pts[1], pts[2]).map(|c| c.center);
        let line_dir = (pts[2] - pts[0]).normalized();
        let all_tangent = idx
            .iter()
            .zip(pts.iter())
            .all(|(&k, &b)| tangent_defect(center, line_dir, b, fp.u(k)) < tol);
        if all_tangent {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::circular_dist_mod_pi;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn square() -> Polygon {
        Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_side_data() {
        let (phi, theta) = side_data(&square());
        for (k, a) in phi.iter().enumerate() {
            assert_abs_diff_eq!(*a, k as f64 * FRAC_PI_2, epsilon = 1e-15);
        }
        for t in theta {
            assert_abs_diff_eq!(t, FRAC_PI_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn triangle_exterior_angles_sum() {
        let p = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(1.0, 2.0)]).unwrap();
        let (_, theta) = side_data(&p);
        // oracle: interior angles from the law of cosines
        let (a, b, c) = (p.vertex(0), p.vertex(1), p.vertex(2));
        let interior = |p: Vec2, q: Vec2, r: Vec2| ((q - p).dot(r - p) / ((q - p).norm() * (r - p).norm())).acos();
        let ext = [PI - interior(a, c, b), PI - interior(b, a, c), PI - interior(c, b, a)];
        for k in 0..3 {
            assert_abs_diff_eq!(theta[k], ext[k], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(theta.iter().sum::<f64>(), TAU, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_triangle_tangent_framing() {
        let angles = [90f64, 210.0, 330.0].map(f64::to_radians);
        let p = Polygon::on_unit_circle(&angles).unwrap();
        let fp = compute_framing_odd(&p).unwrap();
        assert!(fp.max_residual() < 1e-12);
        for (k, a) in angles.iter().enumerate() {
            assert!(circular_dist_mod_pi(fp.u(k).direction(), a + FRAC_PI_2) < 1e-12);
        }
    }

    #[test]
    fn even_rejected_by_odd_framing() {
        assert_eq!(compute_framing_odd(&square()), Err(Error::EvenOrder { n: 4 }));
        let tri = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap();
        assert_eq!(framing_obstruction_even(&tri), Err(Error::OddOrder { n: 3 }));
    }

    #[test]
    fn non_cyclic_quadrilateral_obstructed() {
        let p = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 2.0),
        ])
        .unwrap();
        let ob = framing_obstruction_even(&p).unwrap();
        // oracle: the circle through the first three vertices misses the fourth
        let c = circumcircle(p.vertex(0), p.vertex(1), p.vertex(2)).unwrap();
        assert!((c.center.dist(p.vertex(3)) - c.radius).abs() > 0.1);
        assert!(ob.abs() > 1e-3);
        assert!(matches!(framing_family_even(&p, 0.0, 1e-9), Err(Error::NoFraming { .. })));
    }

    #[test]
    fn square_family() {
        let p = square();
        assert!(framing_obstruction_even(&p).unwrap().abs() < 1e-15);
        let f0 = framing_family_even(&p, 0.0, 1e-9).unwrap();
        let center = Vec2::new(0.5, 0.5);
        for k in 0..4 {
            let radial = (p.vertex(k) - center).normalized();
            assert!(radial.dot(f0.u(k).vec()).abs() < 1e-12);
        }
        let f1 = framing_family_even(&p, PI / 4.0, 1e-9).unwrap();
        assert!(f1.max_residual() < 1e-12);
        for k in 0..4 {
            let shift = if k % 2 == 1 { PI / 4.0 } else { -PI / 4.0 };
            assert!(circular_dist(f1.u(k).direction(), f0.u(k).direction() + shift) < 1e-12);
        }
    }

    #[test]
    fn triangle_is_never_generic() {
        let p = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.2), Vec2::new(1.0, 2.0)]).unwrap();
        let fp = compute_framing_odd(&p).unwrap();
        assert!(!is_generic(&fp));
    }

    #[test]
    fn two_gon_family() {
        let p = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)]).unwrap();
        for s in [0.0, 0.3, 1.2] {
            let fp = framing_family_even(&p, s, 1e-9).unwrap();
            assert!(fp.max_residual() < 1e-12);
        }
    }

    #[test]
    fn flip_preserves_condition() {
        let p = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.1),
            Vec2::new(2.5, 1.3),
            Vec2::new(0.7, 2.0),
            Vec2::new(-0.6, 1.0),
        ])
        .unwrap();
        let fp = compute_framing_odd(&p).unwrap();
        assert!(fp.flipped().max_residual() < 1e-12);
    }
}
