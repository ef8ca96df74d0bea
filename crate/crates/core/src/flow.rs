//! Polygons inscribed in the unit circle, their tangent-length system and
//! the equitangent flow `ψ̇_i = x_i`.
//!
//! Time: the flow is integrated in the clock where `ψ̇_i = x_i`. The arc
//! length travelled by the first vertex is returned alongside as a second
//! clock; it grows at rate `x_1`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{reduce_2pi, Circle, Point2, Vec2};
use crate::numerics::{bisect, rk4_step};

/// Tolerance for "one full turn" and sign tests on gaps.
const TURN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InscribedPolygon {
    psi: Vec<f64>,
}

fn gaps(psi: &[f64]) -> Vec<f64> {
    let n = psi.len();
    (0..n).map(|i| reduce_2pi(psi[(i + 1) % n] - psi[i])).collect()
}

fn is_convex_turn(psi: &[f64]) -> bool {
    let g = gaps(psi);
    g.iter().all(|&x| x > TURN_TOL) && (g.iter().sum::<f64>() - TAU).abs() < 1e-7
}

impl InscribedPolygon {
    /// Angles must increase through exactly one turn.
    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.len() < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 vertices, got {}", psi.len())));
        }
        if psi.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite vertex angle".into()));
        }
        if !is_convex_turn(&psi) {
            return Err(Error::InvalidInput(
                "vertex angles do not increase through one turn (polygon not convex)".into(),
            ));
        }
        Ok(InscribedPolygon { psi })
    }

    /// Accepts star-shaped vertex orders; only finiteness is checked.
    pub fn new_allow_star(psi: Vec<f64>) -> Result<Self> {
        if psi.iter().any(|a| !a.is_finite()) || psi.len() < 3 {
            return Err(Error::InvalidInput("need at least 3 finite vertex angles".into()));
        }
        Ok(InscribedPolygon { psi })
    }

    pub fn regular(n: usize, offset: f64) -> Result<Self> {
        Self::new((0..n).map(|k| offset + TAU * k as f64 / n as f64).collect())
    }

    /// Regular polygon with each vertex moved by up to `jitter` times the
    /// regular spacing; `jitter < 0.5` keeps the vertex order.
    pub fn random<R: rand::Rng>(rng: &mut R, n: usize, jitter: f64) -> Result<Self> {
        let step = TAU / n as f64;
        let offset = rng.gen_range(0.0..TAU);
        Self::new(
            (0..n)
                .map(|k| offset + step * (k as f64 + rng.gen_range(-jitter..=jitter)))
                .collect(),
        )
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn vertices(&self) -> Vec<Point2> {
        self.psi.iter().map(|&a| Vec2::from_angle(a)).collect()
    }

    /// Side lengths `|A_iA_{i+1}| = 2 sin(g_i / 2)`.
    pub fn chords(&self) -> Vec<f64> {
        gaps(&self.psi).iter().map(|g| 2.0 * (0.5 * g).sin()).collect()
    }

    pub fn is_convex(&self) -> bool {
        is_convex_turn(&self.psi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentLengths {
    pub x: Vec<f64>,
    pub chords: Vec<f64>,
    /// Every `x_i` lies in `[0, |A_iA_{i+1}|]`.
    pub geometric: bool,
}

impl TangentLengths {
    /// Largest `|x_i + x_{i+1} − |A_iA_{i+1}||`.
    pub fn residual(&self) -> f64 {
        let n = self.x.len();
        (0..n)
            .map(|i| (self.x[i] + self.x[(i + 1) % n] - self.chords[i]).abs())
            .fold(0.0, f64::max)
    }
}

fn alternating_half_sums(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    (0..n)
        .map(|i| {
            0.5 * (0..n)
                .map(|k| if k % 2 == 0 { c[(i + k) % n] } else { -c[(i + k) % n] })
                .sum::<f64>()
        })
        .collect()
}

fn geometric(x: &[f64], c: &[f64]) -> bool {
    x.iter().zip(c).all(|(&x, &c)| x >= -TURN_TOL && x <= c + TURN_TOL)
}

/// Unique solution of `x_i + x_{i+1} = |A_iA_{i+1}|` for odd `n`.
pub fn tangent_lengths(a: &InscribedPolygon) -> Result<TangentLengths> {
    let n = a.len();
    if n % 2 == 0 {
        return Err(Error::EvenOrder { n });
    }
    let chords = a.chords();
    let x = alternating_half_sums(&chords);
    Ok(TangentLengths {
        geometric: geometric(&x, &chords),
        x,
        chords,
    })
}

/// `Σ (−1)^i |A_iA_{i+1}|` (1-based `i`); vanishes iff the even system is
/// solvable.
pub fn even_consistency(a: &InscribedPolygon) -> Result<f64> {
    let n = a.len();
    if n % 2 == 1 {
        return Err(Error::OddOrder { n });
    }
    Ok(a.chords()
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { -c } else { *c })
        .sum())
}

/// One-parameter family of solutions of the even system, parameterized by
/// `x_1 = s`. Requires [`even_consistency`] to vanish within `tol`.
pub fn tangent_lengths_even(a: &InscribedPolygon, s: f64, tol: f64) -> Result<TangentLengths> {
    let defect = even_consistency(a)?;
    if defect.abs() > tol {
        return Err(Error::Precondition(format!(
            "alternating side sum {defect:.3e} does not vanish"
        )));
    }
    let chords = a.chords();
    let mut x = vec![s];
    for i in 0..a.len() - 1 {
        x.push(chords[i] - x[i]);
    }
    Ok(TangentLengths {
        geometric: geometric(&x, &chords),
        x,
        chords,
    })
}

fn rhs(psi: &[f64]) -> Vec<f64> {
    let c: Vec<f64> = gaps(psi).iter().map(|g| 2.0 * (0.5 * g).sin()).collect();
    alternating_half_sums(&c)
}

/// `ψ̇_i = x_i`.
pub fn flow_rhs(a: &InscribedPolygon) -> Result<Vec<f64>> {
    Ok(tangent_lengths(a)?.x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub psi: Vec<Vec<f64>>,
    /// Arc length travelled by the first vertex (second clock).
    pub arc_length: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.psi.last().expect("trajectory is never empty")
    }
}

/// Integrates the flow with `steps` RK4 steps up to time `t_end`, checking
/// convexity and geometric tangent lengths after every step.
pub fn integrate_flow(a0: &InscribedPolygon, t_end: f64, steps: usize) -> Result<Trajectory> {
    let n = a0.len();
    if n % 2 == 0 {
        return Err(Error::EvenOrder { n });
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let h = t_end / steps as f64;
    let f = |x: &[f64]| Ok(rhs(x));
    let mut traj = Trajectory {
        t: vec![0.0],
        psi: vec![a0.psi.clone()],
        arc_length: vec![0.0],
    };
    let mut y = a0.psi.clone();
    for step in 1..=steps {
        y = rk4_step(&f, &y, h)?;
        if !is_convex_turn(&y) {
            return Err(Error::InvariantLost { step });
        }
        let c: Vec<f64> = gaps(&y).iter().map(|g| 2.0 * (0.5 * g).sin()).collect();
        if !geometric(&alternating_half_sums(&c), &c) {
            return Err(Error::NonGeometric { step });
        }
        traj.t.push(step as f64 * h);
        traj.arc_length.push(y[0] - a0.psi[0]);
        traj.psi.push(y.clone());
    }
    Ok(traj)
}

/// Integrates to `t_end` and reports the change of the endpoint when the
/// step count is doubled.
pub fn integrate_checked(a0: &InscribedPolygon, t_end: f64, steps: usize) -> Result<(Vec<f64>, f64)> {
    let coarse = integrate_flow(a0, t_end, steps)?;
    let fine = integrate_flow(a0, t_end, 2 * steps)?;
    let diff = coarse
        .last()
        .iter()
        .zip(fine.last())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((fine.last().to_vec(), diff))
}

fn shifted_target(psi0: &[f64], k: usize) -> Vec<f64> {
    let n = psi0.len();
    (0..n)
        .map(|i| {
            let j = i + k;
            psi0[j % n] + TAU * (j / n) as f64 + unwrap_offset(psi0, j % n)
        })
        .collect()
}

/// Offset making `ψ_0 ≤ ψ_1 ≤ … < ψ_0 + 2π` when the input angles wrap.
fn unwrap_offset(psi0: &[f64], j: usize) -> f64 {
    let mut off = 0.0;
    for i in 1..=j {
        if psi0[i] + off < psi0[i - 1] {
            off += TAU;
        }
    }
    off
}

fn unwrapped(psi0: &[f64]) -> Vec<f64> {
    (0..psi0.len()).map(|j| psi0[j] + unwrap_offset(psi0, j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftReturn {
    /// Time in the `ψ̇ = x` clock.
    pub tau: f64,
    /// Max-norm angular distance to the shifted start.
    pub defect: f64,
    /// Arc length travelled by the first vertex up to `tau`.
    pub arc_length: f64,
}

/// First time at which the polygon best matches its start with every
/// vertex advanced by `k` positions.
///
/// A dense grid with step `dt` brackets the first minimum of the squared
/// distance `S(t)`; the minimum is then refined by bisection on the sign
/// of `dS/dt = 2 Σ (ψ_i − target_i) x_i`.
pub fn shift_return(a0: &InscribedPolygon, k: usize, max_t: f64, dt: f64) -> Result<ShiftReturn> {
    let n = a0.len();
    if n % 2 == 0 {
        return Err(Error::EvenOrder { n });
    }
    let start = unwrapped(&a0.psi);
    let target = shifted_target(&a0.psi, k);
    let f = |x: &[f64]| Ok(rhs(x));
    let ds = |y: &[f64]| -> f64 {
        let x = rhs(y);
        2.0 * (0..n).map(|i| (y[i] - target[i]) * x[i]).sum::<f64>()
    };
    let max_dev = |y: &[f64]| (0..n).map(|i| (y[i] - target[i]).abs()).fold(0.0, f64::max);
    // a coarse match must be closer than half the smallest gap
    let coarse_tol = 0.5 * gaps(&a0.psi).into_iter().fold(f64::INFINITY, f64::min);

    let mut t = 0.0;
    let mut y = start.clone();
    let mut prev_ds = ds(&y);
    while t < max_t {
        let y_next = rk4_step(&f, &y, dt)?;
        let d_next = ds(&y_next);
        if prev_ds < 0.0 && d_next >= 0.0 && max_dev(&y_next).min(max_dev(&y)) < coarse_tol {
            let base = y.clone();
            let at = |s: f64| rk4_step(&f, &base, s).map(|z| ds(&z)).unwrap_or(f64::NAN);
            let s = bisect(at, 0.0, dt, 1e-15, 200).unwrap_or(0.5 * dt);
            let z = rk4_step(&f, &base, s)?;
            return Ok(ShiftReturn {
                tau: t + s,
                defect: max_dev(&z),
                arc_length: z[0] - start[0],
            });
        }
        y = y_next;
        prev_ds = d_next;
        t += dt;
    }
    Err(Error::NoReturn { max_t })
}

/// Shift by one vertex.
pub fn monodromy_defect(a0: &InscribedPolygon, max_t: f64, dt: f64) -> Result<ShiftReturn> {
    shift_return(a0, 1, max_t, dt)
}

/// Return to the start with every vertex advanced once around the circle.
pub fn full_period(a0: &InscribedPolygon, max_t: f64, dt: f64) -> Result<ShiftReturn> {
    shift_return(a0, a0.len(), max_t, dt)
}

/// `T_0 = 2π / sin(π/n)`, the period of the regular solution.
pub fn regular_period(n: usize) -> f64 {
    TAU / (PI / n as f64).sin()
}

/// Tangency points `B_{i+1/2} = A_i + x_i (A_{i+1} − A_i)/|A_{i+1} − A_i|`.
pub fn envelope_points(a: &InscribedPolygon) -> Result<Vec<Point2>> {
    let tl = tangent_lengths(a)?;
    if !tl.geometric {
        return Err(Error::NonGeometric { step: 0 });
    }
    let v = a.vertices();
    let n = v.len();
    Ok((0..n)
        .map(|i| v[i] + (v[(i + 1) % n] - v[i]).normalized() * tl.x[i])
        .collect())
}

/// Incircle of a triangle.
pub fn incircle(a: Point2, b: Point2, c: Point2) -> Circle {
    let (la, lb, lc) = (b.dist(c), c.dist(a), a.dist(b));
    let per = la + lb + lc;
    let center = (a * la + b * lb + c * lc) * (1.0 / per);
    let area = 0.5 * (b - a).cross(c - a).abs();
    Circle {
        center,
        radius: 2.0 * area / per,
    }
}

/// Spread `max − min` of `|A_i(t+h) − A_i(t)| / x_i(t)` over the vertices
/// after one RK4 step of size `h`.
pub fn displacement_ratio_spread(a: &InscribedPolygon, h: f64) -> Result<f64> {
    let x = tangent_lengths(a)?.x;
    let f = |y: &[f64]| Ok(rhs(y));
    let y = rk4_step(&f, a.psi(), h)?;
    let ratios: Vec<f64> = (0..a.len())
        .map(|i| Vec2::from_angle(y[i]).dist(Vec2::from_angle(a.psi()[i])) / x[i])
        .collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn regular_tangent_lengths() {
        for n in [3, 5, 7, 9] {
            let a = InscribedPolygon::regular(n, 0.3).unwrap();
            let tl = tangent_lengths(&a).unwrap();
            for x in &tl.x {
                assert_abs_diff_eq!(*x, (PI / n as f64).sin(), epsilon = 1e-14);
            }
            assert!(tl.geometric);
        }
        let tl = tangent_lengths(&InscribedPolygon::regular(5, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(tl.x[0], 0.587_785_252_292_473, epsilon = 1e-12);
    }

    #[test]
    fn even_cases() {
        let sq = InscribedPolygon::regular(4, 0.0).unwrap();
        assert!(even_consistency(&sq).unwrap().abs() < 1e-15);
        assert_eq!(tangent_lengths(&sq), Err(Error::EvenOrder { n: 4 }));
        let q = InscribedPolygon::new(vec![0.0, 1.0, 2.5, 4.0]).unwrap();
        assert!(even_consistency(&q).unwrap().abs() > 1e-3);
        let tri = InscribedPolygon::regular(3, 0.0).unwrap();
        assert_eq!(even_consistency(&tri), Err(Error::OddOrder { n: 3 }));
    }

    #[test]
    fn convexity_enforced() {
        assert!(InscribedPolygon::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(InscribedPolygon::new_allow_star(vec![0.0, 2.0, 1.0]).is_ok());
        // wrapping input is fine as long as it is one counterclockwise turn
        assert!(InscribedPolygon::new(vec![5.0, 0.5, 2.0]).is_ok());
    }

    #[test]
    fn regular_envelope_is_midpoints() {
        let a = InscribedPolygon::regular(7, 0.1).unwrap();
        for b in envelope_points(&a).unwrap() {
            assert_abs_diff_eq!(b.norm(), (PI / 7.0).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn incircle_of_right_triangle() {
        let c = incircle(Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0), Vec2::new(0.0, 4.0));
        assert_abs_diff_eq!(c.radius, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.center.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.center.y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn regular_pentagon_one_step_shift() {
        let a = InscribedPolygon::regular(5, 0.0).unwrap();
        let r = monodromy_defect(&a, 20.0, 1e-2).unwrap();
        assert_abs_diff_eq!(r.tau, regular_period(5) / 5.0, epsilon = 1e-9);
        assert!(r.defect < 1e-9);
    }
}
