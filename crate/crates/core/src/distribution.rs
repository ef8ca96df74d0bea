//! The rank-`n` distribution on chain space spanned by the fields `v_i`,
//! its first brackets, and the pushed-forward distribution on framed
//! polygons.
//!
//! Tangent vectors are carried in ambient coordinates: one velocity per
//! center and one rate per signed radius. A tangent is admissible when the
//! linearized tangency constraint `e_i · (Ȯ_{i+1} − Ȯ_i) = ṙ_{i+1} − ṙ_i`
//! holds on every edge.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chain::{chain_to_framed, double_angles, is_generic_chain, OrientedChain};
use crate::error::{Error, Result};
use crate::framed::{is_generic, FramedPolygon, Polygon};
use crate::geom::{wrap_pi, Vec2};
use crate::numerics::{flow_commutator, flow_loop, nullspace, numerical_rank, rk4_flow, singular_values};

/// `|sin θ|` below this makes the `w` fields and the kernel field undefined.
pub const SINE_TOL: f64 = 1e-8;

/// Default step for flow-composition brackets.
pub const DEFAULT_BRACKET_STEP: f64 = 1e-4;

/// Relative singular-value threshold for numerical rank.
pub const RANK_REL_TOL: f64 = 1e-6;

/// RK4 steps per flow leg in bracket estimates.
const FLOW_STEPS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTangent {
    pub vertex_velocities: Vec<Vec2>,
    pub radius_rates: Vec<f64>,
}

impl ChainTangent {
    pub fn zero(n: usize) -> Self {
        ChainTangent {
            vertex_velocities: vec![Vec2::ZERO; n],
            radius_rates: vec![0.0; n],
        }
    }

    /// Same layout as [`OrientedChain::to_state`].
    pub fn to_vec(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.vertex_velocities.iter().flat_map(|v| [v.x, v.y]).collect();
        s.extend_from_slice(&self.radius_rates);
        s
    }

    pub fn from_vec(s: &[f64]) -> Self {
        let n = s.len() / 3;
        ChainTangent {
            vertex_velocities: (0..n).map(|i| Vec2::new(s[2 * i], s[2 * i + 1])).collect(),
            radius_rates: s[2 * n..].to_vec(),
        }
    }

    fn add_scaled(&mut self, other: &ChainTangent, c: f64) {
        for (a, b) in self.vertex_velocities.iter_mut().zip(&other.vertex_velocities) {
            *a += *b * c;
        }
        for (a, b) in self.radius_rates.iter_mut().zip(&other.radius_rates) {
            *a += b * c;
        }
    }
}

/// Per-edge residual of the linearized tangency constraint.
pub fn constraint_residuals(chain: &OrientedChain, t: &ChainTangent) -> Result<Vec<f64>> {
    let n = chain.len();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let e = chain.edge_unit(i)?;
            let dv = t.vertex_velocities[j] - t.vertex_velocities[i];
            Ok(e.dot(dv) - (t.radius_rates[j] - t.radius_rates[i]))
        })
        .collect()
}

/// Rates of the signed edge lengths `o_i d|O_iO_{i+1}|/dt`; they sum to
/// the rate of the signed perimeter.
pub fn signed_edge_rates(chain: &OrientedChain, t: &ChainTangent) -> Result<Vec<f64>> {
    let n = chain.len();
    (0..n)
        .map(|i| {
            let e = chain.edge_unit(i)?;
            Ok(e.dot(t.vertex_velocities[(i + 1) % n] - t.vertex_velocities[i]))
        })
        .collect()
}

/// `2θ_i = ∠(u_{i−1/2}, u_{i+1/2})` and the oriented edge units.
fn edge_data(chain: &OrientedChain) -> Result<(Vec<Vec2>, Vec<f64>)> {
    let n = chain.len();
    let e = (0..n).map(|i| chain.edge_unit(i)).collect::<Result<Vec<_>>>()?;
    Ok((e, double_angles(chain)?))
}

/// `v_i`: moves `O_i` with velocity `J(u_{i+1/2} − u_{i−1/2})` and changes
/// `r_i` at rate `−sin 2θ_i`.
pub fn v_field(chain: &OrientedChain, i: usize) -> Result<ChainTangent> {
    let n = chain.len();
    let i = i % n;
    let (e, two_theta) = edge_data(chain)?;
    let mut t = ChainTangent::zero(n);
    t.vertex_velocities[i] = (e[i] - e[(i + n - 1) % n]).rot90();
    t.radius_rates[i] = -two_theta[i].sin();
    Ok(t)
}

fn sin_sq(two_theta: f64, index: usize) -> Result<f64> {
    let s = (0.5 * two_theta).sin();
    if s.abs() < SINE_TOL {
        return Err(Error::VanishingSine { index, value: s });
    }
    Ok(s * s)
}

/// `w_{a+1/2}`: moves `O_a` and `O_{a+1}` along `u_{a+1/2}` with speeds
/// `1/sin²θ` and changes their radii at rates `cos 2θ / sin²θ`.
pub fn w_field(chain: &OrientedChain, a: usize) -> Result<ChainTangent> {
    let n = chain.len();
    let a = a % n;
    let b = (a + 1) % n;
    let (e, two_theta) = edge_data(chain)?;
    let sa = sin_sq(two_theta[a], a)?;
    let sb = sin_sq(two_theta[b], b)?;
    let mut t = ChainTangent::zero(n);
    t.vertex_velocities[a] = e[a] * (1.0 / sa);
    t.vertex_velocities[b] = e[a] * (1.0 / sb);
    t.radius_rates[a] = two_theta[a].cos() / sa;
    t.radius_rates[b] = two_theta[b].cos() / sb;
    Ok(t)
}

/// `ξ = Σ w_j + Σ (cos θ_i / sin³ θ_i) v_i`, which generates the fibers of
/// the projection to center polygons.
pub fn kernel_field(chain: &OrientedChain) -> Result<ChainTangent> {
    let n = chain.len();
    let (_, two_theta) = edge_data(chain)?;
    let mut xi = ChainTangent::zero(n);
    for a in 0..n {
        xi.add_scaled(&w_field(chain, a)?, 1.0);
    }
    for (i, &tt) in two_theta.iter().enumerate() {
        let th = 0.5 * tt;
        let s = th.sin();
        if s.abs() < SINE_TOL {
            return Err(Error::VanishingSine { index: i, value: s });
        }
        xi.add_scaled(&v_field(chain, i)?, th.cos() / (s * s * s));
    }
    Ok(xi)
}

/// Selects one of the named vector fields on chain space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainField {
    V(usize),
    /// `w_{a+1/2}`, between circles `a` and `a + 1`.
    W(usize),
    Kernel,
}

pub fn eval_field(chain: &OrientedChain, f: ChainField) -> Result<ChainTangent> {
    match f {
        ChainField::V(i) => v_field(chain, i),
        ChainField::W(a) => w_field(chain, a),
        ChainField::Kernel => kernel_field(chain),
    }
}

fn state_field(f: ChainField) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
    move |s: &[f64]| eval_field(&OrientedChain::from_state_unchecked(s), f).map(|t| t.to_vec())
}

/// Flow of a field for time `t` (RK4 with `steps` steps).
pub fn flow_field(chain: &OrientedChain, f: ChainField, t: f64, steps: usize) -> Result<OrientedChain> {
    let s = rk4_flow(&state_field(f), &chain.to_state(), t, steps)?;
    Ok(OrientedChain::from_state_unchecked(&s))
}

/// Numerical commutator `[F, G]` at `chain` from flow compositions of
/// step `h`, with the odd error term removed.
pub fn lie_bracket(chain: &OrientedChain, f: ChainField, g: ChainField, h: f64) -> Result<ChainTangent> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("bracket step must be positive, got {h}")));
    }
    let x = chain.to_state();
    let (ff, gg) = (state_field(f), state_field(g));
    let looped = OrientedChain::from_state_unchecked(&flow_loop(&ff, &gg, &x, h, FLOW_STEPS)?);
    let residual = looped.max_tangency_residual();
    if !(residual <= 1e-8 * chain.diameter().max(1.0)) {
        return Err(Error::StepTooLarge { residual });
    }
    Ok(ChainTangent::from_vec(&flow_commutator(&ff, &gg, &x, h, FLOW_STEPS)?))
}

/// Bracket at `h` together with the Richardson ratio `|B(h)| / |B(h/2)|`.
pub fn lie_bracket_checked(
    chain: &OrientedChain,
    f: ChainField,
    g: ChainField,
    h: f64,
) -> Result<(ChainTangent, f64)> {
    let b1 = lie_bracket(chain, f, g, h)?;
    let b2 = lie_bracket(chain, f, g, 0.5 * h)?;
    let n1 = crate::numerics::norm(&b1.to_vec());
    let n2 = crate::numerics::norm(&b2.to_vec());
    Ok((b1, n1 / n2))
}

/// Jacobian of the tangency constraints, one row per edge.
pub fn constraint_jacobian(chain: &OrientedChain) -> Result<DMatrix<f64>> {
    let n = chain.len();
    let mut m = DMatrix::zeros(n, 3 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        let e = chain.edge_unit(i)?;
        m[(i, 2 * j)] += e.x;
        m[(i, 2 * j + 1)] += e.y;
        m[(i, 2 * i)] -= e.x;
        m[(i, 2 * i + 1)] -= e.y;
        m[(i, 2 * n + j)] -= 1.0;
        m[(i, 2 * n + i)] += 1.0;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub h: f64,
}

/// Numerical rank of a family of ambient tangents after normalizing each
/// and expressing it in an orthonormal basis of the constraint tangent
/// space.
pub fn tangent_rank(chain: &OrientedChain, columns: &[Vec<f64>]) -> Result<(usize, Vec<f64>)> {
    let basis = nullspace(&constraint_jacobian(chain)?, 1e-12);
    let dim = 3 * chain.len();
    let mut m = DMatrix::zeros(dim, columns.len());
    for (c, col) in columns.iter().enumerate() {
        let norm = crate::numerics::norm(col);
        for (r, x) in col.iter().enumerate() {
            m[(r, c)] = x / norm;
        }
    }
    let projected = basis.transpose() * m;
    let sv = singular_values(&projected);
    Ok((numerical_rank(&sv, RANK_REL_TOL), sv))
}

/// Rank of `{v_i}` together with the brackets `[v_{a}, v_{a+1}]`.
pub fn bracket_rank(chain: &OrientedChain, h: f64) -> Result<RankReport> {
    let n = chain.len();
    if n < 4 {
        return Err(Error::UnsupportedN {
            n,
            reason: "rank certification needs at least 4 circles",
        });
    }
    if !is_generic_chain(chain) {
        return Err(Error::NonGenericChain);
    }
    let mut cols = Vec::with_capacity(2 * n);
    for i in 0..n {
        cols.push(v_field(chain, i)?.to_vec());
    }
    for a in 0..n {
        cols.push(lie_bracket(chain, ChainField::V(a), ChainField::V(a + 1), h)?.to_vec());
    }
    let (rank, singular_values) = tangent_rank(chain, &cols)?;
    Ok(RankReport {
        n,
        rank,
        singular_values,
        h,
    })
}

/// Billiard reflection direction at vertex `i`: sum of the incoming and
/// outgoing unit vectors.
pub fn birkhoff_direction(p: &Polygon, i: usize) -> Vec2 {
    let n = p.len();
    let i = i % n;
    let prev = p.vertex(i + n - 1);
    let cur = p.vertex(i);
    let next = p.vertex(i + 1);
    (cur - prev).normalized() + (next - cur).normalized()
}

/// Infinitesimal deformation of a framed polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedTangent {
    pub vertex_velocities: Vec<Vec2>,
    /// Rates of the framing directions `α_i`.
    pub framing_rates: Vec<f64>,
}

impl FramedTangent {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.vertex_velocities.iter().flat_map(|v| [v.x, v.y]).collect();
        s.extend_from_slice(&self.framing_rates);
        s
    }
}

/// Rates `φ̇_i` of the side directions under vertex velocities `v`.
fn side_direction_rates(p: &Polygon, v: &[Vec2]) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let d = p.side(i);
            d.cross(v[(i + 1) % n] - v[i]) / d.norm_sq()
        })
        .collect()
}

/// Generator of the framed-polygon distribution.
///
/// Odd `n`: `η_k` moves vertex `k` with velocity `u_k`; the framing follows
/// the unique odd-`n` framing. Even `n`: `ν_m` moves vertices `m − 1` and
/// `m` (the two tangency points on circle `m`) along their framing vectors
/// with the ratio that keeps the even-`n` closing condition to first order;
/// the overall sign makes the coefficient sum nonnegative.
pub fn pushforward_d(fp: &FramedPolygon, index: usize) -> Result<FramedTangent> {
    if !is_generic(fp) {
        return Err(Error::NonGenericFramedPolygon);
    }
    let n = fp.len();
    let p = fp.polygon();
    let mut v = vec![Vec2::ZERO; n];
    if n % 2 == 1 {
        let k = index % n;
        v[k] = fp.u(k).vec();
        let phi_dot = side_direction_rates(p, &v);
        let framing_rates = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j % 2 == 0 { phi_dot[(i + j) % n] } else { -phi_dot[(i + j) % n] })
                    .sum()
            })
            .collect();
        return Ok(FramedTangent {
            vertex_velocities: v,
            framing_rates,
        });
    }
    let m = index % n;
    let a = (m + n - 1) % n;
    let b = m;
    let d_prev = p.side(a + n - 1);
    let d_mid = p.side(a);
    let d_next = p.side(b);
    let (ua, ub) = (fp.u(a).vec(), fp.u(b).vec());
    let ca = d_prev.cross(ua) / d_prev.norm_sq() + d_mid.cross(ua) / d_mid.norm_sq();
    let cb = -d_mid.cross(ub) / d_mid.norm_sq() - d_next.cross(ub) / d_next.norm_sq();
    let (mut la, mut lb) = (cb, -ca);
    let scale = la.hypot(lb);
    if scale < SINE_TOL {
        return Err(Error::NonGenericFramedPolygon);
    }
    if la + lb < 0.0 {
        la = -la;
        lb = -lb;
    }
    v[a] = ua * (la / scale);
    v[b] = ub * (lb / scale);
    let phi_dot = side_direction_rates(p, &v);
    let mut framing_rates = vec![0.0; n];
    framing_rates[a] = 2.0 * phi_dot[(a + n - 1) % n];
    framing_rates[b] = 2.0 * phi_dot[b];
    Ok(FramedTangent {
        vertex_velocities: v,
        framing_rates,
    })
}

/// The chain-side field `v_m` carried to framed polygons through the
/// chain-to-framed bijection by a central difference of the flow.
pub fn transported_v(chain: &OrientedChain, m: usize, h: f64) -> Result<FramedTangent> {
    let plus = chain_to_framed(&flow_field(chain, ChainField::V(m), h, 1)?)?;
    let minus = chain_to_framed(&flow_field(chain, ChainField::V(m), -h, 1)?)?;
    let n = chain.len();
    let vertex_velocities = (0..n)
        .map(|k| (plus.polygon().vertex(k) - minus.polygon().vertex(k)) * (0.5 / h))
        .collect();
    let framing_rates = (0..n)
        .map(|k| wrap_pi(plus.u(k).direction() - minus.u(k).direction()) / (2.0 * h))
        .collect();
    Ok(FramedTangent {
        vertex_velocities,
        framing_rates,
    })
}

/// True if every vertex velocity is a nonnegative multiple of the framing
/// vector at that vertex (within `tol` relative to the largest speed).
pub fn in_positive_cone(fp: &FramedPolygon, t: &FramedTangent, tol: f64) -> bool {
    let vmax = t.vertex_velocities.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if vmax == 0.0 {
        return true;
    }
    t.vertex_velocities.iter().enumerate().all(|(k, v)| {
        let u = fp.u(k).vec();
        u.dot(*v) >= -tol * vmax && u.cross(*v).abs() <= tol * vmax
    })
}
