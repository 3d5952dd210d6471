//! Nonnegative least squares by the Lawson–Hanson active-set method.
//!
//! The systems solved here are tiny (one column per contact point of an
//! inscribed ellipsoid), so the unconstrained subproblems go through an SVD.

use nalgebra::{DMatrix, DVector};

/// Solve `min ‖A w − y‖₂` subject to `w ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.amax().max(1.0);
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let residual = y - a * &x;
        let grad = a.transpose() * residual;
        // most-violated candidate among the free set
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] && grad[j] > tol && best.is_none_or(|(_, g)| grad[j] > g) {
                best = Some((j, grad[j]));
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;

        loop {
            let z = ls_on_passive(a, y, &passive);
            let min_passive = (0..n)
                .filter(|&j| passive[j])
                .map(|j| z[j])
                .fold(f64::INFINITY, f64::min);
            if min_passive > tol {
                x = z;
                break;
            }
            // step toward z until the first passive coordinate hits zero
            let mut alpha = f64::INFINITY;
            for j in 0..n {
                if passive[j] && z[j] <= tol {
                    let denom = x[j] - z[j];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                x = z;
                break;
            }
            for j in 0..n {
                if passive[j] {
                    x[j] += alpha * (z[j] - x[j]);
                    if x[j] <= tol {
                        x[j] = 0.0;
                        passive[j] = false;
                    }
                }
            }
        }
    }
    x
}

fn ls_on_passive(a: &DMatrix<f64>, y: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let mut sub = DMatrix::<f64>::zeros(a.nrows(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        sub.set_column(k, &a.column(j));
    }
    let svd = sub.svd(true, true);
    let sol = svd.solve(y, 1e-12).expect("svd solve");
    let mut z = DVector::<f64>::zeros(passive.len());
    for (k, &j) in cols.iter().enumerate() {
        z[j] = sol[k];
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn unconstrained_solution_is_kept_when_positive() {
        let a = dmatrix![1.0, 0.0; 0.0, 1.0];
        let y = dvector![2.0, 3.0];
        let w = nnls(&a, &y);
        assert!((w[0] - 2.0).abs() < 1e-10 && (w[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn clamps_negative_coordinates() {
        // unconstrained optimum has a negative coordinate
        let a = dmatrix![1.0, 1.0; 0.0, 1.0];
        let y = dvector![1.0, -1.0];
        let w = nnls(&a, &y);
        assert!(w.iter().all(|&v| v >= 0.0));
        // optimum among w>=0 is w = (1, 0) by inspection of the normal equations
        let r = &y - &a * &w;
        let grad = a.transpose() * r;
        for j in 0..2 {
            if w[j] == 0.0 {
                assert!(grad[j] <= 1e-9);
            } else {
                assert!(grad[j].abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn decomposition_of_identity_for_cube_contacts() {
        // contacts ±e1, ±e2; match sum w u⊗u = I in vectorized form
        let us = [
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
        ];
        let mut a = DMatrix::<f64>::zeros(3, 4);
        for (k, u) in us.iter().enumerate() {
            a[(0, k)] = u[0] * u[0];
            a[(1, k)] = u[1] * u[1];
            a[(2, k)] = std::f64::consts::SQRT_2 * u[0] * u[1];
        }
        let y = dvector![1.0, 1.0, 0.0];
        let w = nnls(&a, &y);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-9, "trace identity failed: {total}");
        let res = (&a * &w - &y).norm();
        assert!(res < 1e-9);
    }
}
