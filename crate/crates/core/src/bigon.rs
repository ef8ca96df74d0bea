//! Framed 2-gons in the coordinates `(p, q, r, α, φ)`.
//!
//! `φ` is the chord direction, `r` its half-length, `α` the framing angle,
//! and `(p, q)` the chord midpoint in a frame rotated with the chord. The
//! distribution is the common kernel of
//! `θ1 = dp + q dφ + tan α dr` and `θ2 = dq − (p − r cot α) dφ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point2, UnitVector, Vec2};
use crate::numerics::{flow_commutator, numerical_rank, singular_values};

/// Angles within this distance of a multiple of π/2 are rejected.
pub const ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigonState {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    pub phi: f64,
}

/// Rates `(p′, q′, r′, α′, φ′)`.
pub type BigonTangent = [f64; 5];

impl BigonState {
    pub fn new(p: f64, q: f64, r: f64, alpha: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput(format!("half-length r must be positive, got {r}")));
        }
        if ![p, q, r, alpha, phi].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("non-finite bigon coordinate".into()));
        }
        Ok(BigonState { p, q, r, alpha, phi })
    }

    /// Random state with `r ∈ [0.2, 3]` and `α` at least 0.2 away from the
    /// multiples of `π/2`.
    pub fn random<R: rand::Rng>(rng: &mut R) -> Self {
        let mut alpha = rng.gen_range(0.2..FRAC_PI_2 - 0.2);
        if rng.gen_bool(0.5) {
            alpha = PI - alpha;
        }
        BigonState {
            p: rng.gen_range(-2.0..2.0),
            q: rng.gen_range(-2.0..2.0),
            r: rng.gen_range(0.2..3.0),
            alpha,
            phi: rng.gen_range(0.0..TAU),
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.p, self.q, self.r, self.alpha, self.phi]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        BigonState {
            p: s[0],
            q: s[1],
            r: s[2],
            alpha: s[3],
            phi: s[4],
        }
    }

    pub fn midpoint(&self) -> Point2 {
        let (s, c) = self.phi.sin_cos();
        Vec2::new(self.p * s - self.q * c, -self.p * c - self.q * s)
    }
}

/// Endpoints and framing vectors `(B1, u1, B2, u2)`.
pub fn to_endpoints(s: &BigonState) -> (Point2, UnitVector, Point2, UnitVector) {
    let m = s.midpoint();
    let d = Vec2::from_angle(s.phi) * s.r;
    (
        m - d,
        UnitVector::from_angle(s.phi - s.alpha),
        m + d,
        UnitVector::from_angle(s.phi + s.alpha),
    )
}

/// `(θ1(w), θ2(w))`.
pub fn forms(s: &BigonState, w: &BigonTangent) -> (f64, f64) {
    let t1 = w[0] + s.q * w[4] + s.alpha.tan() * w[2];
    let t2 = w[1] - (s.p - s.r / s.alpha.tan()) * w[4];
    (t1, t2)
}

fn check_angle(alpha: f64) -> Result<()> {
    let (sin, cos) = alpha.sin_cos();
    if sin.abs() < ANGLE_TOL || cos.abs() < ANGLE_TOL {
        return Err(Error::SingularAngle { alpha });
    }
    Ok(())
}

/// Generators `ν = ∂α`, `ξ = ∂φ − q ∂p + (p − r cot α) ∂q` and
/// `η = tan α ∂p − ∂r`.
pub fn generator_fields(s: &BigonState) -> Result<[BigonTangent; 3]> {
    check_angle(s.alpha)?;
    let cot = 1.0 / s.alpha.tan();
    Ok([
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [-s.q, s.p - s.r * cot, 0.0, 0.0, 1.0],
        [s.alpha.tan(), 0.0, -1.0, 0.0, 0.0],
    ])
}

fn field(k: usize) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
    move |x: &[f64]| Ok(generator_fields(&BigonState::from_slice(x))?[k].to_vec())
}

/// Closed forms `[ν, ξ] = (r / sin²α) ∂q` and `[ν, η] = (1 / cos²α) ∂p`.
pub fn exact_commutators(s: &BigonState) -> (BigonTangent, BigonTangent) {
    let sin = s.alpha.sin();
    let cos = s.alpha.cos();
    (
        [0.0, s.r / (sin * sin), 0.0, 0.0, 0.0],
        [1.0 / (cos * cos), 0.0, 0.0, 0.0, 0.0],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BigonCertificate {
    pub nu_xi: BigonTangent,
    pub nu_eta: BigonTangent,
    /// Relative errors against the closed forms.
    pub nu_xi_error: f64,
    pub nu_eta_error: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub h: f64,
}

fn rel_err(a: &BigonTangent, b: &BigonTangent) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let n: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / n
}

/// Numerical brackets `[ν, ξ]`, `[ν, η]` and the rank of the five fields.
pub fn bigon_commutators(s: &BigonState, h: f64) -> Result<BigonCertificate> {
    let gens = generator_fields(s)?;
    let x = s.to_array();
    let nu_xi: BigonTangent = flow_commutator(&field(0), &field(1), &x, h, 2)?
        .try_into()
        .expect("five components");
    let nu_eta: BigonTangent = flow_commutator(&field(0), &field(2), &x, h, 2)?
        .try_into()
        .expect("five components");
    let (e1, e2) = exact_commutators(s);
    let mut m = DMatrix::zeros(5, 5);
    for (c, col) in gens.iter().chain([&nu_xi, &nu_eta]).enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        for r in 0..5 {
            m[(r, c)] = col[r] / norm;
        }
    }
    let sv = singular_values(&m);
    Ok(BigonCertificate {
        nu_xi_error: rel_err(&nu_xi, &e1),
        nu_eta_error: rel_err(&nu_eta, &e2),
        nu_xi,
        nu_eta,
        rank: numerical_rank(&sv, 1e-6),
        singular_values: sv,
        h,
    })
}

/// A sampled path `(t_k, state_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigonPath {
    pub t: Vec<f64>,
    pub states: Vec<BigonState>,
}

impl BigonPath {
    pub fn new(t: Vec<f64>, states: Vec<BigonState>) -> Result<Self> {
        if t.len() != states.len() || t.len() < 3 {
            return Err(Error::InvalidInput("path needs at least 3 samples with matching times".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
        }
        Ok(BigonPath { t, states })
    }

    pub fn sample<F: Fn(f64) -> BigonState>(f: F, t0: f64, t1: f64, samples: usize) -> Result<Self> {
        let t: Vec<f64> = (0..samples)
            .map(|k| t0 + (t1 - t0) * k as f64 / (samples - 1) as f64)
            .collect();
        let states = t.iter().map(|&x| f(x)).collect();
        Self::new(t, states)
    }

    /// Velocities at samples from the derivative of the quadratic through
    /// each sample and its neighbours (one-sided at the ends), so second
    /// order also on non-uniform grids.
    pub fn velocities(&self) -> Vec<BigonTangent> {
        let n = self.t.len();
        (0..n)
            .map(|k| {
                let j = k.clamp(1, n - 2);
                let (t0, t1, t2) = (self.t[j - 1], self.t[j], self.t[j + 1]);
                let x = self.t[k];
                let w0 = (2.0 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
                let w1 = (2.0 * x - t0 - t2) / ((t1 - t0) * (t1 - t2));
                let w2 = (2.0 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
                let (a, b, c) = (
                    self.states[j - 1].to_array(),
                    self.states[j].to_array(),
                    self.states[j + 1].to_array(),
                );
                std::array::from_fn(|i| w0 * a[i] + w1 * b[i] + w2 * c[i])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularVerdict {
    #[serde(rename = "SINGULAR-CANDIDATE")]
    SingularCandidate,
    #[serde(rename = "REGULAR")]
    Regular,
}

impl std::fmt::Display for SingularVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SingularVerdict::SingularCandidate => "SINGULAR-CANDIDATE",
            SingularVerdict::Regular => "REGULAR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularReport {
    pub verdict: SingularVerdict,
    /// Largest `|θ(w)| / |w|` along the path.
    pub form_residual: f64,
    /// Largest `|φ′| / |w|` along the path.
    pub max_phi_rate: f64,
    /// Largest over samples of the smallest singular value of
    /// `λ ↦ i_w Ω(λ)`, relative to `|w|`; near zero means the velocity lies
    /// in the kernel of some `Ω(λ)`.
    pub omega_defect: f64,
}

/// The 1-form `i_w dθ1` and `i_w dθ2` as coefficient vectors in
/// `(dp, dq, dr, dα, dφ)`.
///
/// With `dθ1 = dq∧dφ + sec²α dα∧dr` and
/// `dθ2 = dφ∧dp − cot α dφ∧dr + r csc²α dφ∧dα`.
pub fn contracted_differentials(s: &BigonState, w: &BigonTangent) -> ([f64; 5], [f64; 5]) {
    let [dp, dq, dr, da, dphi] = *w;
    let sec2 = 1.0 / s.alpha.cos().powi(2);
    let csc2 = 1.0 / s.alpha.sin().powi(2);
    let cot = 1.0 / s.alpha.tan();
    // i_w (a∧b) = a(w) b − b(w) a
    let mut o1 = [0.0; 5];
    o1[4] += dq;
    o1[1] -= dphi;
    o1[2] += sec2 * da;
    o1[3] -= sec2 * dr;
    let mut o2 = [0.0; 5];
    o2[0] += dphi;
    o2[4] -= dp;
    o2[2] -= cot * dphi;
    o2[4] += cot * dr;
    o2[3] += s.r * csc2 * dphi;
    o2[4] -= s.r * csc2 * da;
    (o1, o2)
}

fn omega_defect(s: &BigonState, w: &BigonTangent) -> f64 {
    let (o1, o2) = contracted_differentials(s, w);
    let m = DMatrix::from_fn(5, 2, |r, c| if c == 0 { o1[r] } else { o2[r] });
    let sv = singular_values(&m);
    let speed = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    sv[1] / speed
}

/// Singularity test for a horizontal path: the velocity can lie in the
/// kernel of `Ω(λ) = λ1 dθ1 + λ2 dθ2` only if `φ′ = 0`, so a path whose
/// chord never rotates is reported as a candidate and any rotation makes it
/// regular. `tol` bounds the relative form residual.
pub fn singular_curve_test(path: &BigonPath, tol: f64) -> Result<SingularReport> {
    let vel = path.velocities();
    let mut form_residual: f64 = 0.0;
    let mut max_phi_rate: f64 = 0.0;
    let mut omega: f64 = 0.0;
    for (s, w) in path.states.iter().zip(&vel) {
        check_angle(s.alpha)?;
        let speed = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if speed == 0.0 {
            continue;
        }
        let (t1, t2) = forms(s, w);
        form_residual = form_residual.max(t1.abs().max(t2.abs()) / speed);
        max_phi_rate = max_phi_rate.max(w[4].abs() / speed);
        omega = omega.max(omega_defect(s, w));
    }
    if form_residual > tol {
        return Err(Error::NotHorizontal {
            residual: form_residual,
        });
    }
    let verdict = if max_phi_rate <= tol {
        SingularVerdict::SingularCandidate
    } else {
        SingularVerdict::Regular
    };
    Ok(SingularReport {
        verdict,
        form_residual,
        max_phi_rate,
        omega_defect: omega,
    })
}

/// Endpoint velocities `(B1′, B2′)` along `w`, by central differences of
/// [`to_endpoints`].
pub fn endpoint_velocities(s: &BigonState, w: &BigonTangent, h: f64) -> (Vec2, Vec2) {
    let x = s.to_array();
    let at = |sign: f64| {
        let y: Vec<f64> = (0..5).map(|i| x[i] + sign * h * w[i]).collect();
        to_endpoints(&BigonState::from_slice(&y))
    };
    let (p1, _, p2, _) = at(1.0);
    let (m1, _, m2, _) = at(-1.0);
    ((p1 - m1) * (0.5 / h), (p2 - m2) * (0.5 / h))
}

/// Positive cone: both endpoints move along nonnegative multiples of their
/// framing vectors. The inequality is read off from finite differences of
/// the endpoint map.
pub fn is_positive(s: &BigonState, w: &BigonTangent, tol: f64) -> bool {
    let (v1, v2) = endpoint_velocities(s, w, 1e-6);
    let (_, u1, _, u2) = to_endpoints(s);
    let scale = v1.norm().max(v2.norm()).max(f64::MIN_POSITIVE);
    [(v1, u1), (v2, u2)]
        .iter()
        .all(|(v, u)| u.vec().dot(*v) >= -tol * scale && u.vec().cross(*v).abs() <= tol * scale)
}
