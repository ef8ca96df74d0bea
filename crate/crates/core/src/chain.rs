//! Oriented chains of cyclically tangent circles with signed radii.
//!
//! Sign convention: a circle with positive signed radius rotates
//! counterclockwise when the chain turns like a train of gears.
//!
//! Edge `i` of the center polygon joins `O_i` to `O_{i+1}`. Its oriented
//! unit vector `e_i = (O_{i+1} − O_i)/(r_{i+1} − r_i)` points toward the
//! larger signed radius, and the tangency point of `C_i` and `C_{i+1}` is
//! `O_i − r_i e_i = O_{i+1} − r_{i+1} e_i`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::framed::{FramedPolygon, Polygon};
use crate::geom::{circle_through_point_pair_tangent_to_directions, Point2, UnitVector, Vec2};

/// Absolute tolerance for the tangency constraint, scaled by the chain size.
pub const CHAIN_TOL: f64 = 1e-9;

/// Relative tolerance (times chain diameter) for coincident tangency points.
pub const COINCIDENCE_REL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct OrientedChain {
    centers: Vec<Point2>,
    radii: Vec<f64>,
}

fn scale_of(centers: &[Point2], radii: &[f64]) -> f64 {
    let c = centers.iter().map(|p| p.x.abs().max(p.y.abs())).fold(0.0, f64::max);
    let r = radii.iter().map(|r| r.abs()).fold(0.0, f64::max);
    1f64.max(c).max(r)
}

impl OrientedChain {
    pub fn new(centers: Vec<Point2>, radii: Vec<f64>) -> Result<Self> {
        Self::with_tol(centers, radii, CHAIN_TOL)
    }

    pub fn with_tol(centers: Vec<Point2>, radii: Vec<f64>, tol: f64) -> Result<Self> {
        let n = centers.len();
        if n < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 circles, got {n}")));
        }
        if radii.len() != n {
            return Err(Error::InvalidChain(format!("{} radii for {n} centers", radii.len())));
        }
        if centers.iter().any(|c| !c.is_finite()) || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidChain("non-finite data".into()));
        }
        let chain = OrientedChain { centers, radii };
        let scale = scale_of(&chain.centers, &chain.radii);
        for i in 0..n {
            let j = (i + 1) % n;
            if chain.radii[i] == chain.radii[j] && chain.centers[i] == chain.centers[j] {
                return Err(Error::InvalidChain(format!("circles {i} and {j} coincide")));
            }
            let res = chain.tangency_residual(i);
            if res > tol * scale {
                return Err(Error::InvalidChain(format!(
                    "circles {i} and {j} are not tangent (residual {res:.3e})"
                )));
            }
        }
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Point2] {
        &self.centers
    }

    pub fn signed_radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn center(&self, i: usize) -> Point2 {
        self.centers[i % self.len()]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i % self.len()]
    }

    /// `| |O_iO_{i+1}| − |r_{i+1} − r_i| |`.
    pub fn tangency_residual(&self, i: usize) -> f64 {
        let d = self.center(i + 1).dist(self.center(i));
        (d - (self.radius(i + 1) - self.radius(i)).abs()).abs()
    }

    pub fn max_tangency_residual(&self) -> f64 {
        (0..self.len()).map(|i| self.tangency_residual(i)).fold(0.0, f64::max)
    }

    /// Diameter of the union of the circles (bounding estimate).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                d = d.max(self.centers[i].dist(self.centers[j]) + self.radii[i].abs() + self.radii[j].abs());
            }
        }
        d
    }

    /// Oriented unit vector of edge `i`, from the smaller to the larger
    /// signed radius.
    pub fn edge_unit(&self, i: usize) -> Result<Vec2> {
        let n = self.len();
        let dr = self.radius(i + 1) - self.radius(i);
        if dr == 0.0 {
            return Err(Error::EqualSignedRadii { index: i % n, next: (i + 1) % n });
        }
        // normalized rather than divided by dr so that states slightly off
        // the tangency constraint (inside integrators) still give unit vectors
        Ok((self.center(i + 1) - self.center(i)).normalized() * dr.signum())
    }

    /// Flat state vector `[x_0, y_0, …, x_{n−1}, y_{n−1}, r_0, …, r_{n−1}]`.
    pub fn to_state(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.centers.iter().flat_map(|c| [c.x, c.y]).collect();
        s.extend_from_slice(&self.radii);
        s
    }

    /// Inverse of [`to_state`](Self::to_state) without validation.
    pub fn from_state_unchecked(state: &[f64]) -> Self {
        let n = state.len() / 3;
        let centers = (0..n).map(|i| Vec2::new(state[2 * i], state[2 * i + 1])).collect();
        OrientedChain {
            centers,
            radii: state[2 * n..].to_vec(),
        }
    }

    /// Representative with the first nonzero radius positive.
    pub fn canonical(&self) -> Self {
        match self.radii.iter().find(|r| **r != 0.0) {
            Some(r) if *r < 0.0 => self.flipped(),
            _ => self.clone(),
        }
    }

    /// All signed radii negated.
    pub fn flipped(&self) -> Self {
        OrientedChain {
            centers: self.centers.clone(),
            radii: self.radii.iter().map(|r| -r).collect(),
        }
    }
}

/// Adds `c` to every signed radius; differences and hence tangency are
/// unchanged.
pub fn add_constant(chain: &OrientedChain, c: f64) -> OrientedChain {
    OrientedChain {
        centers: chain.centers.clone(),
        radii: chain.radii.iter().map(|r| r + c).collect(),
    }
}

/// Polygon of centers with each edge oriented toward the larger radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLengthPolygon {
    pub vertices: Vec<Point2>,
    /// `+1` if edge `i` points from `O_i` to `O_{i+1}`, else `−1`.
    pub edge_orientations: Vec<i8>,
}

impl ZeroLengthPolygon {
    pub fn signed_perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| f64::from(self.edge_orientations[i]) * self.vertices[(i + 1) % n].dist(self.vertices[i]))
            .sum()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[(i + 1) % n].dist(self.vertices[i])).sum()
    }
}

pub fn centers_polygon(chain: &OrientedChain) -> Result<ZeroLengthPolygon> {
    let n = chain.len();
    let mut edge_orientations = Vec::with_capacity(n);
    for i in 0..n {
        let dr = chain.radius(i + 1) - chain.radius(i);
        if dr == 0.0 {
            return Err(Error::EqualSignedRadii { index: i, next: (i + 1) % n });
        }
        edge_orientations.push(if dr > 0.0 { 1 } else { -1 });
    }
    Ok(ZeroLengthPolygon {
        vertices: chain.centers.clone(),
        edge_orientations,
    })
}

/// Lifts a zero-length polygon to a chain with first radius `r1`.
pub fn lift_polygon(e: &ZeroLengthPolygon, r1: f64) -> Result<OrientedChain> {
    lift_polygon_with_tol(e, r1, CHAIN_TOL)
}

pub fn lift_polygon_with_tol(e: &ZeroLengthPolygon, r1: f64, tol: f64) -> Result<OrientedChain> {
    let n = e.vertices.len();
    if n < 2 || e.edge_orientations.len() != n {
        return Err(Error::InvalidChain("orientation count must equal vertex count".into()));
    }
    let signed_perimeter = e.signed_perimeter();
    if signed_perimeter.abs() > tol * e.perimeter().max(1.0) {
        return Err(Error::InconsistentClosure { signed_perimeter });
    }
    let mut radii = Vec::with_capacity(n);
    radii.push(r1);
    for i in 0..n - 1 {
        let len = e.vertices[i + 1].dist(e.vertices[i]);
        radii.push(radii[i] + f64::from(e.edge_orientations[i]) * len);
    }
    OrientedChain::with_tol(e.vertices.clone(), radii, tol)
}

/// Tangency point of two circles, labelled by the half-integer between
/// their indices (`index` stores the lower circle index `i` for `i + 1/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyPoint {
    pub point: Point2,
    pub index: usize,
}

/// Tangency points `B_{i+1/2}` of `C_i` and `C_{i+1}`.
pub fn tangency_points(chain: &OrientedChain) -> Result<Vec<TangencyPoint>> {
    (0..chain.len())
        .map(|i| {
            let e = chain.edge_unit(i)?;
            Ok(TangencyPoint {
                point: chain.center(i) - e * chain.radius(i),
                index: i,
            })
        })
        .collect()
}

/// True iff the two tangency points on every circle are distinct.
pub fn is_generic_chain(chain: &OrientedChain) -> bool {
    let Ok(pts) = tangency_points(chain) else {
        return false;
    };
    let n = pts.len();
    let tol = COINCIDENCE_REL_TOL * chain.diameter();
    (0..n).all(|i| pts[i].point.dist(pts[(i + n - 1) % n].point) > tol)
}

/// Framed polygon of tangency points with the common gear tangents.
pub fn chain_to_framed(chain: &OrientedChain) -> Result<FramedPolygon> {
    if !is_generic_chain(chain) {
        return Err(Error::NonGenericChain);
    }
    let pts = tangency_points(chain)?;
    let mut framing = Vec::with_capacity(chain.len());
    for i in 0..chain.len() {
        let e = chain.edge_unit(i)?;
        framing.push(UnitVector::from_vec(-e.rot90())?);
    }
    let polygon = Polygon::new(pts.iter().map(|t| t.point).collect())?;
    Ok(FramedPolygon::new_unchecked(polygon, framing))
}

/// Chain of circles through consecutive vertex pairs tangent to the
/// framing. Circle `j` passes through vertices `j − 1` and `j`.
pub fn framed_to_chain(fp: &FramedPolygon, tol: f64) -> Result<OrientedChain> {
    if !crate::framed::is_generic(fp) {
        return Err(Error::NonGenericFramedPolygon);
    }
    let n = fp.len();
    let p = fp.polygon();
    let mut centers = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for j in 0..n {
        let a = (j + n - 1) % n;
        let c = circle_through_point_pair_tangent_to_directions(p.vertex(a), fp.u(a), p.vertex(j), fp.u(j), tol)?;
        centers.push(c.center);
        radii.push(c.signed_radius);
    }
    let chain = OrientedChain { centers, radii };
    let scale = scale_of(&chain.centers, &chain.radii);
    let residual = chain.max_tangency_residual();
    if residual > tol.max(CHAIN_TOL) * scale * 1e3 {
        return Err(Error::OrientationObstruction { residual });
    }
    Ok(chain)
}

/// Directed half-angle data `2θ_i = ∠(e_{i−1}, e_i)` in `(−π, π]`.
pub fn double_angles(chain: &OrientedChain) -> Result<Vec<f64>> {
    let n = chain.len();
    let e: Vec<Vec2> = (0..n).map(|i| chain.edge_unit(i)).collect::<Result<_>>()?;
    Ok((0..n)
        .map(|i| {
            let a = e[(i + n - 1) % n];
            let b = e[i];
            a.cross(b).atan2(a.dot(b))
        })
        .collect())
}

/// Margins used when sampling chains for the distribution experiments.
#[derive(Debug, Clone, Copy)]
pub struct SampleMargins {
    /// Lower bound on `|sin θ_i|`.
    pub min_sin: f64,
    /// Lower bound on `|r_{i+1} − r_i|` (edge length).
    pub min_edge: f64,
    /// Lower bound on `|r_i|`.
    pub min_radius: f64,
}

impl Default for SampleMargins {
    fn default() -> Self {
        SampleMargins {
            min_sin: 0.15,
            min_edge: 0.3,
            min_radius: 0.2,
        }
    }
}

fn circle_intersections(c1: Point2, r1: f64, c2: Point2, r2: f64) -> Option<(Point2, Point2)> {
    let d = c2 - c1;
    let l = d.norm();
    if l == 0.0 || l > r1 + r2 || l < (r1 - r2).abs() {
        return None;
    }
    let a = (l * l + r1 * r1 - r2 * r2) / (2.0 * l);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = d * (1.0 / l);
    let m = c1 + u * a;
    Some((m + u.rot90() * h, m - u.rot90() * h))
}

/// Random closed zero-length polygon: `n − 1` vertices placed by random
/// steps of lengths `|r_{i+1} − r_i|`, the last vertex corrected so both of
/// its edges have the prescribed lengths.
fn sample_zero_length_polygon<R: Rng>(rng: &mut R, n: usize, m: &SampleMargins) -> Option<ZeroLengthPolygon> {
    let mut radii = Vec::with_capacity(n);
    radii.push(rng.gen_range(-3.0..3.0));
    while radii.len() < n {
        let r: f64 = rng.gen_range(-3.0..3.0);
        if (r - radii[radii.len() - 1]).abs() >= m.min_edge {
            radii.push(r);
        }
    }
    if (radii[0] - radii[n - 1]).abs() < m.min_edge {
        return None;
    }
    let mut centers = vec![Vec2::ZERO];
    for i in 0..n - 2 {
        let len = (radii[i + 1] - radii[i]).abs();
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let next = centers[i] + Vec2::from_angle(a) * len;
        centers.push(next);
    }
    let last = circle_intersections(
        centers[n - 2],
        (radii[n - 1] - radii[n - 2]).abs(),
        centers[0],
        (radii[0] - radii[n - 1]).abs(),
    )?;
    centers.push(if rng.gen_bool(0.5) { last.0 } else { last.1 });
    let edge_orientations = (0..n)
        .map(|i| if radii[(i + 1) % n] > radii[i] { 1 } else { -1 })
        .collect();
    Some(ZeroLengthPolygon {
        vertices: centers,
        edge_orientations,
    })
}

/// True when the chain clears the sampling margins.
pub fn within_margins(chain: &OrientedChain, m: &SampleMargins) -> bool {
    let n = chain.len();
    let Ok(two_theta) = double_angles(chain) else {
        return false;
    };
    if two_theta.iter().any(|t| (0.5 * t).sin().abs() < m.min_sin) {
        return false;
    }
    if chain.signed_radii().iter().any(|r| r.abs() < m.min_radius) {
        return false;
    }
    (0..n).all(|i| (chain.radius(i + 1) - chain.radius(i)).abs() >= m.min_edge) && is_generic_chain(chain)
}

/// Random generic oriented chain of `n ≥ 4` circles clearing `margins`.
pub fn random_generic_chain<R: Rng>(rng: &mut R, n: usize, margins: &SampleMargins) -> Result<OrientedChain> {
    if n < 4 {
        return Err(Error::UnsupportedN {
            n,
            reason: "chains with fewer than 4 circles are never generic",
        });
    }
    for _ in 0..100_000 {
        let Some(e) = sample_zero_length_polygon(rng, n, margins) else {
            continue;
        };
        let r1 = rng.gen_range(-3.0..3.0);
        let Ok(chain) = lift_polygon(&e, r1) else {
            continue;
        };
        if within_margins(&chain, margins) {
            return Ok(chain);
        }
    }
    Err(Error::Numerical(format!("no chain with n = {n} cleared the sampling margins")))
}
