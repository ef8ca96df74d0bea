//! Small numerical helpers: fixed-step RK4, flow-composition commutators,
//! singular-value rank and nullspace bases.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::Result;

/// One classical fourth-order Runge-Kutta step of size `h`.
pub fn rk4_step<F>(f: &F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let k1 = f(x)?;
    let x2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * k1[i]).collect();
    let k2 = f(&x2)?;
    let x3: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * k2[i]).collect();
    let k3 = f(&x3)?;
    let x4: Vec<f64> = (0..n).map(|i| x[i] + h * k3[i]).collect();
    let k4 = f(&x4)?;
    Ok((0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Flow of `f` for time `t`, integrated with `steps` RK4 steps.
pub fn rk4_flow<F>(f: &F, x: &[f64], t: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let h = t / steps as f64;
    let mut y = x.to_vec();
    for _ in 0..steps {
        y = rk4_step(f, &y, h)?;
    }
    Ok(y)
}

/// `Φ^G_{-h} Φ^F_{-h} Φ^G_h Φ^F_h (x)`.
pub fn flow_loop<F, G>(f: &F, g: &G, x: &[f64], h: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let y = rk4_flow(f, x, h, steps)?;
    let y = rk4_flow(g, &y, h, steps)?;
    let y = rk4_flow(f, &y, -h, steps)?;
    rk4_flow(g, &y, -h, steps)
}

/// Commutator `[F, G](x) = DG·F − DF·G` estimated from the flow loop.
///
/// The raw quotient `(loop(h) − x)/h²` carries an `O(h)` error term that is
/// odd in `h`; averaging the loops at `h` and `−h` cancels it, so the
/// returned estimate is second-order accurate.
pub fn flow_commutator<F, G>(f: &F, g: &G, x: &[f64], h: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let plus = flow_loop(f, g, x, h, steps)?;
    let minus = flow_loop(f, g, x, -h, steps)?;
    Ok((0..x.len())
        .map(|i| (plus[i] + minus[i] - 2.0 * x[i]) / (2.0 * h * h))
        .collect())
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numerical_rank(singular: &[f64], rel_tol: f64) -> usize {
    let max = singular.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Orthonormal basis (as columns) of the nullspace of `m`, of dimension
/// `cols − rank`, where rank is taken from the eigenvalues of `mᵀm`.
pub fn nullspace(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let keep: Vec<usize> = (0..cols)
        .filter(|&i| eig.eigenvalues[i].abs() <= rel_tol * max.max(f64::MIN_POSITIVE))
        .collect();
    let mut basis = DMatrix::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(i));
    }
    basis
}

/// Euclidean angle between two vectors, in `[0, π]`.
pub fn vector_angle(a: &[f64], b: &[f64]) -> f64 {
    let a = DVector::from_column_slice(a);
    let b = DVector::from_column_slice(b);
    let c = a.dot(&b) / (a.norm() * b.norm());
    c.clamp(-1.0, 1.0).acos()
}

/// Angle between the lines spanned by two vectors, in `[0, π/2]`.
pub fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let t = vector_angle(a, b);
    t.min(std::f64::consts::PI - t)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rk4_exponential() {
        let f = |x: &[f64]| Ok(vec![x[0]]);
        let y = rk4_flow(&f, &[1.0], 1.0, 100).unwrap();
        assert_abs_diff_eq!(y[0], 1f64.exp(), epsilon = 1e-9);
    }

    #[test]
    fn commutator_of_linear_fields() {
        // F = A x, G = B x: [F,G] = DG·F − DF·G = (BA − AB) x
        let f = |x: &[f64]| Ok(vec![x[1], 0.0]);
        let g = |x: &[f64]| Ok(vec![0.0, x[0]]);
        let x = [0.3, -0.7];
        let c = flow_commutator(&f, &g, &x, 1e-3, 4).unwrap();
        // A = [[0,1],[0,0]], B = [[0,0],[1,0]]; BA − AB = diag(-1, 1)
        assert_abs_diff_eq!(c[0], -0.3, epsilon = 1e-5);
        assert_abs_diff_eq!(c[1], -0.7, epsilon = 1e-5);
    }

    #[test]
    fn nullspace_of_row() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((m * ns).norm() < 1e-12);
    }

    #[test]
    fn rank_threshold() {
        assert_eq!(numerical_rank(&[1.0, 1e-3, 1e-9], 1e-6), 2);
        assert_eq!(numerical_rank(&[], 1e-6), 0);
    }
}
