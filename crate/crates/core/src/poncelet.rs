//! Bicentric polygons: Euler and Fuss relations and Poncelet iteration.
//!
//! The outer circle has radius `R` and is centered at the origin; the inner
//! circle has radius `r` and center `(d, 0)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::InscribedPolygon;
use crate::geom::{reduce_2pi, Point2, Vec2};
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicentricConfig {
    pub n: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub d: f64,
}

impl BicentricConfig {
    pub fn new(n: usize, big_r: f64, r: f64, d: f64) -> Result<Self> {
        let cfg = BicentricConfig { n, big_r, r, d };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidInput(format!("need n >= 3, got {}", self.n)));
        }
        if !(self.r > 0.0 && self.d >= 0.0 && self.r + self.d < self.big_r) || !self.big_r.is_finite() {
            return Err(Error::InvalidInput(format!(
                "inner circle (r = {}, d = {}) must lie strictly inside the outer circle (R = {})",
                self.r, self.d, self.big_r
            )));
        }
        Ok(())
    }

    /// Same configuration scaled to `R = 1`.
    pub fn normalized(&self) -> Self {
        BicentricConfig {
            n: self.n,
            big_r: 1.0,
            r: self.r / self.big_r,
            d: self.d / self.big_r,
        }
    }

    pub fn inner_center(&self) -> Point2 {
        Vec2::new(self.d, 0.0)
    }
}

/// `R² − d² − 2rR` for triangles, `(R² − d²)² − 2r²(R² + d²)` for
/// quadrilaterals.
pub fn euler_fuss_residual(cfg: &BicentricConfig) -> Result<f64> {
    cfg.validate()?;
    let (rr, r, d) = (cfg.big_r, cfg.r, cfg.d);
    match cfg.n {
        3 => Ok(rr * rr - d * d - 2.0 * r * rr),
        4 => Ok((rr * rr - d * d).powi(2) - 2.0 * r * r * (rr * rr + d * d)),
        n => Err(Error::UnsupportedN {
            n,
            reason: "closed-form relation known only for n = 3 and n = 4",
        }),
    }
}

/// Next vertex: follow the tangent from `p` that keeps the inner center on
/// the left, to its second intersection with the outer circle.
fn next_vertex(cfg: &BicentricConfig, p: Point2) -> Result<Point2> {
    let w = cfg.inner_center() - p;
    let l = w.norm();
    if l <= cfg.r {
        return Err(Error::NoTangent);
    }
    let beta = (cfg.r / l).asin();
    let dir = (w * (1.0 / l)).rotate(-beta);
    let t = -2.0 * p.dot(dir);
    Ok(p + dir * t)
}

/// Counterclockwise angle swept by `steps` Poncelet steps from angle `start`.
fn swept_angle(cfg: &BicentricConfig, start: f64, steps: usize) -> Result<(f64, Vec<f64>)> {
    let mut p = Vec2::from_angle(start) * cfg.big_r;
    let mut psi = vec![start];
    let mut total = 0.0;
    for _ in 0..steps {
        let q = next_vertex(cfg, p)?;
        total += reduce_2pi(q.angle() - p.angle());
        psi.push(start + total);
        p = q;
    }
    Ok((total, psi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Closure {
    /// Swept angle after `n` steps minus the nearest multiple of 2π.
    pub closure_defect: f64,
    /// Number of turns made by the `n` steps.
    pub turns: i64,
    pub polygon: InscribedPolygon,
}

/// Iterates the tangent-line map `n` times from angle `start`.
pub fn poncelet_closure(cfg: &BicentricConfig, start: f64) -> Result<Closure> {
    cfg.validate()?;
    let (total, mut psi) = swept_angle(cfg, start, cfg.n)?;
    psi.pop();
    let turns = (total / TAU).round() as i64;
    Ok(Closure {
        closure_defect: total - TAU * turns as f64,
        turns,
        polygon: InscribedPolygon::new_allow_star(psi)?,
    })
}

/// Rotation number of the Poncelet map estimated from `iterations` steps.
pub fn rotation_number(cfg: &BicentricConfig, iterations: usize) -> Result<f64> {
    let (total, _) = swept_angle(cfg, 0.5, iterations)?;
    Ok(total / (TAU * iterations as f64))
}

/// Closes a one-parameter family: bisection on the rotation number to
/// bracket `1/n`, then on the one-turn closure defect.
fn solve_closing<F>(make: F, lo: f64, hi: f64, n: usize, increasing: bool) -> Result<f64>
where
    F: Fn(f64) -> BicentricConfig,
{
    let target = 1.0 / n as f64;
    let rho = |x: f64| {
        let v = rotation_number(&make(x), 4000).unwrap_or(f64::NAN) - target;
        if increasing {
            v
        } else {
            -v
        }
    };
    let coarse = bisect(rho, lo, hi, 1e-10 * (hi - lo), 200)
        .ok_or_else(|| Error::Precondition(format!("no closing {n}-gon in the parameter range")))?;
    let defect = |x: f64| {
        swept_angle(&make(x), 0.0, n)
            .map(|(t, _)| t - TAU)
            .unwrap_or(f64::NAN)
    };
    let span = 1e-3 * (hi - lo);
    let (a, b) = ((coarse - span).max(lo), (coarse + span).min(hi));
    bisect(defect, a, b, 1e-15, 200).ok_or_else(|| Error::Numerical("closure defect did not change sign".into()))
}

/// Outer radius for which `n`-gons close around the inner circle `(r, d)`.
pub fn solve_outer_radius(n: usize, r: f64, d: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    if !(r > 0.0 && d >= 0.0) {
        return Err(Error::InvalidInput("need r > 0 and d >= 0".into()));
    }
    let lo = (r + d) * (1.0 + 1e-9) + 1e-12;
    let hi = (r + d) * 1e3;
    solve_closing(|big_r| BicentricConfig { n, big_r, r, d }, lo, hi, n, true)
}

/// Center distance for which `n`-gons close, given `R` and `r`.
pub fn solve_center_distance(n: usize, big_r: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < big_r) {
        return Err(Error::InvalidInput("need 0 < r < R".into()));
    }
    let hi = (big_r - r) * (1.0 - 1e-9);
    solve_closing(|d| BicentricConfig { n, big_r, r, d }, 0.0, hi, n, false)
}

/// `R = r + √(r² + d²)`, the triangle solution of Euler's relation.
pub fn euler_outer_radius(r: f64, d: f64) -> f64 {
    r + (r * r + d * d).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn relation_examples() {
        assert_abs_diff_eq!(euler_fuss_residual(&BicentricConfig::new(3, 1.0, 0.5, 0.0).unwrap()).unwrap(), 0.0);
        let sq = BicentricConfig::new(4, 1.0, 0.5f64.sqrt(), 0.0).unwrap();
        assert_abs_diff_eq!(euler_fuss_residual(&sq).unwrap(), 0.0, epsilon = 1e-15);
        let e = BicentricConfig::new(3, 0.9, 0.4, 0.3).unwrap();
        assert_abs_diff_eq!(euler_fuss_residual(&e).unwrap(), 0.0, epsilon = 1e-15);
        let five = BicentricConfig::new(5, 1.0, 0.5, 0.0).unwrap();
        assert!(matches!(euler_fuss_residual(&five), Err(Error::UnsupportedN { .. })));
    }

    #[test]
    fn square_closes() {
        let cfg = BicentricConfig::new(4, 1.0, 0.5f64.sqrt(), 0.0).unwrap();
        let c = poncelet_closure(&cfg, 0.2).unwrap();
        assert!(c.closure_defect.abs() < 1e-12);
        assert_eq!(c.turns, 1);
    }

    #[test]
    fn euler_solver() {
        let r = solve_outer_radius(3, 0.4, 0.3).unwrap();
        assert_abs_diff_eq!(r, 0.9, epsilon = 1e-10);
        assert_abs_diff_eq!(euler_outer_radius(0.4, 0.3), 0.9, epsilon = 1e-15);
        let d = solve_center_distance(3, 0.9, 0.4).unwrap();
        assert_abs_diff_eq!(d, 0.3, epsilon = 1e-9);
    }

    #[test]
    fn invalid_config() {
        assert!(BicentricConfig::new(3, 0.6, 0.4, 0.3).is_err());
    }
}
