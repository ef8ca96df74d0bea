//! Linearization of the equitangent flow at the regular polygon: the
//! circulant system `β̇ = M_n β`, its spectrum, and integer-relation scans
//! among the eigenvalue magnitudes.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect, rk4_step};

fn check_odd(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::EvenOrder { n });
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    Ok(())
}

/// `cos(π/n)` times the circulant matrix with first row `(0, 1, −1, …, −1)`.
pub fn linearized_matrix(n: usize) -> Result<DMatrix<f64>> {
    check_odd(n)?;
    let c = (PI / n as f64).cos();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let k = (j + n - i) % n;
        match k {
            0 => 0.0,
            k if k % 2 == 1 => c,
            _ => -c,
        }
    }))
}

/// `|λ_j| = cos(π/n) tan(πj/n)` for `j = 1, …, (n − 1)/2`.
pub fn spectrum(n: usize) -> Result<Vec<f64>> {
    check_odd(n)?;
    let c = (PI / n as f64).cos();
    Ok((1..=(n - 1) / 2).map(|j| c * (PI * j as f64 / n as f64).tan()).collect())
}

/// Positive imaginary parts of the eigenvalues of `linearized_matrix(n)`
/// from a general eigensolver, sorted ascending.
pub fn numerical_spectrum(n: usize) -> Result<Vec<f64>> {
    let m = linearized_matrix(n)?;
    let mut im: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im)
        .filter(|&x| x > 1e-9)
        .collect();
    im.sort_by(f64::total_cmp);
    Ok(im)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegerRelation {
    pub coefficients: Vec<i64>,
    pub value: f64,
}

/// All integer vectors `c` with `|c_j| ≤ bound`, first nonzero entry
/// positive, such that `|Σ c_j |λ_j|| < 1e−10`.
pub fn independence_scan(n: usize, bound: i64) -> Result<Vec<IntegerRelation>> {
    check_odd(n)?;
    if n < 5 {
        return Err(Error::UnsupportedN {
            n,
            reason: "a relation scan needs at least two eigenvalue magnitudes (n >= 5)",
        });
    }
    if bound < 1 {
        return Err(Error::InvalidInput("coefficient bound must be at least 1".into()));
    }
    let lam = spectrum(n)?;
    let m = lam.len();
    let mut found = Vec::new();
    let mut c = vec![-bound; m];
    loop {
        if let Some(first) = c.iter().find(|&&x| x != 0) {
            if *first > 0 {
                let value: f64 = c.iter().zip(&lam).map(|(&k, l)| k as f64 * l).sum();
                if value.abs() < 1e-10 {
                    found.push(IntegerRelation {
                        coefficients: c.clone(),
                        value,
                    });
                }
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == m {
                return Ok(found);
            }
            if c[i] < bound {
                c[i] += 1;
                break;
            }
            c[i] = -bound;
            i += 1;
        }
    }
}

/// Perturbation vector with zero sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizedState {
    beta: Vec<f64>,
}

impl LinearizedState {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        let s: f64 = beta.iter().sum();
        let scale = beta.iter().map(|b| b.abs()).fold(1.0, f64::max);
        if s.abs() > 1e-12 * scale * beta.len() as f64 {
            return Err(Error::InvalidInput(format!("perturbation must sum to zero, got {s:.3e}")));
        }
        Ok(LinearizedState { beta })
    }

    /// Subtracts the mean.
    pub fn centered(mut beta: Vec<f64>) -> Self {
        let mean = beta.iter().sum::<f64>() / beta.len() as f64;
        for b in &mut beta {
            *b -= mean;
        }
        LinearizedState { beta }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// `(cos(2πjk/n), sin(2πjk/n))_k`, a basis of the `j`-th invariant plane.
pub fn eigenplane_basis(n: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
    let arg = |k: usize| TAU * (j * k) as f64 / n as f64;
    ((0..n).map(|k| arg(k).cos()).collect(), (0..n).map(|k| arg(k).sin()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearTrajectory {
    pub t: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
}

/// RK4 integration of `β̇ = M_n β`.
pub fn linearized_flow(beta0: &LinearizedState, t_end: f64, steps: usize) -> Result<LinearTrajectory> {
    let n = beta0.beta.len();
    let m = linearized_matrix(n)?;
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let f = |x: &[f64]| Ok((&m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec());
    let h = t_end / steps as f64;
    let mut traj = LinearTrajectory {
        t: vec![0.0],
        beta: vec![beta0.beta.clone()],
    };
    let mut y = beta0.beta.clone();
    for k in 1..=steps {
        y = rk4_step(&f, &y, h)?;
        traj.t.push(k as f64 * h);
        traj.beta.push(y.clone());
    }
    Ok(traj)
}

/// Period of the rotation in the `j`-th eigenplane, found as the time at
/// which the unwrapped phase of the projection reaches `2π`.
pub fn eigenplane_period(n: usize, j: usize, steps_per_unit: usize) -> Result<f64> {
    check_odd(n)?;
    if j == 0 || 2 * j >= n {
        return Err(Error::InvalidInput(format!("eigenplane index must be in 1..={}", (n - 1) / 2)));
    }
    let m = linearized_matrix(n)?;
    let (c, s) = eigenplane_basis(n, j);
    let f = |x: &[f64]| Ok((&m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec());
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let phase = |y: &[f64]| dot(y, &s).atan2(dot(y, &c));
    let h = 1.0 / steps_per_unit as f64;
    let mut y = c.clone();
    let mut t = 0.0;
    let mut unwrapped = 0.0;
    let mut last = phase(&y);
    while t < 1e4 {
        let next = rk4_step(&f, &y, h)?;
        let p = phase(&next);
        let dp = crate::geom::wrap_pi(p - last);
        if (unwrapped + dp).abs() >= TAU {
            let base = y.clone();
            let before = unwrapped;
            let sign = dp.signum();
            let g = |s: f64| {
                let z = rk4_step(&f, &base, s).expect("linear field");
                before + crate::geom::wrap_pi(phase(&z) - last) - sign * TAU
            };
            let s = bisect(g, 0.0, h, 1e-16, 200).unwrap_or(0.5 * h);
            return Ok(t + s);
        }
        unwrapped += dp;
        last = p;
        y = next;
        t += h;
    }
    Err(Error::NoReturn { max_t: 1e4 })
}

/// Smallest distance `|β(t) − β(0)|` over `t ∈ [t_min, t_max]`, sampled
/// with step `dt`.
pub fn min_return_distance(beta0: &LinearizedState, t_min: f64, t_max: f64, dt: f64) -> Result<f64> {
    let steps = (t_max / dt).ceil() as usize;
    let traj = linearized_flow(beta0, steps as f64 * dt, steps)?;
    Ok(traj
        .t
        .iter()
        .zip(&traj.beta)
        .filter(|(t, _)| **t >= t_min)
        .map(|(_, b)| {
            b.iter()
                .zip(beta0.beta())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matrix_n3() {
        let m = linearized_matrix(3).unwrap();
        let c = 0.5;
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, c, -c, -c, 0.0, c, c, -c, 0.0]);
        assert!((m - expect).norm() < 1e-15);
    }

    #[test]
    fn rows_sum_to_zero() {
        for n in [3, 5, 7, 9] {
            let m = linearized_matrix(n).unwrap();
            let ones = nalgebra::DVector::from_element(n, 1.0);
            assert!((m * ones).norm() < 1e-14);
        }
        assert_eq!(linearized_matrix(4), Err(Error::EvenOrder { n: 4 }));
    }

    #[test]
    fn spectrum_examples() {
        assert_abs_diff_eq!(spectrum(3).unwrap()[0], 3f64.sqrt() / 2.0, epsilon = 1e-15);
        let s5 = spectrum(5).unwrap();
        assert_abs_diff_eq!(s5[0], (PI / 5.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(s5[1], 2.489_898_7, epsilon = 1e-6);
        assert_abs_diff_eq!(s5[0] / s5[1], 5f64.sqrt() - 2.0, epsilon = 1e-12);
    }

    #[test]
    fn scan_rejects_small_n() {
        assert!(independence_scan(3, 10).is_err());
        assert!(independence_scan(5, 3).unwrap().is_empty());
    }

    #[test]
    fn zero_state_stays_zero() {
        let z = LinearizedState::new(vec![0.0; 5]).unwrap();
        let tr = linearized_flow(&z, 3.0, 30).unwrap();
        assert!(tr.beta.iter().all(|b| b.iter().all(|x| *x == 0.0)));
        assert!(LinearizedState::new(vec![1.0, 0.0, 0.0]).is_err());
    }
}
