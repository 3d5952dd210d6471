//! Dense two-phase simplex for the small linear programs that show up in
//! polytope handling (Chebyshev centers, bounding boxes, min-max
//! normalization). Problems here have at most a few hundred rows and a
//! handful of free variables, so a plain tableau with Bland's rule is both
//! fast enough and deterministic.

// tableau rows are updated in pairs; index loops beat the borrow checker
#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

/// Maximize `c·x` subject to `A x <= b` with `x` free.
///
/// Free variables are split as `x = u - w` with `u, w >= 0` before running
/// the standard two-phase tableau simplex.
pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> LpOutcome {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(c.len(), n);
    assert_eq!(b.len(), m);

    // columns: u(n) | w(n) | slack(m) | artificial(k) | rhs
    let mut artificial_of_row = vec![usize::MAX; m];
    let mut n_art = 0;
    for i in 0..m {
        if b[i] < 0.0 {
            artificial_of_row[i] = n_art;
            n_art += 1;
        }
    }
    let ncols = 2 * n + m + n_art + 1;
    let rhs_col = ncols - 1;
    let art_base = 2 * n + m;

    let mut t = vec![vec![0.0f64; ncols]; m + 1];
    let mut basis = vec![0usize; m];

    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[(i, j)];
            t[i][n + j] = -sign * a[(i, j)];
        }
        t[i][2 * n + i] = sign;
        t[i][rhs_col] = sign * b[i];
        if artificial_of_row[i] != usize::MAX {
            let col = art_base + artificial_of_row[i];
            t[i][col] = 1.0;
            basis[i] = col;
        } else {
            basis[i] = 2 * n + i;
        }
    }

    // Phase 1: minimize the sum of artificials (maximize its negative).
    // The z-row of that objective, reduced against the artificial basis, is
    // minus the sum of the rows that carry an artificial.
    if n_art > 0 {
        for j in 0..ncols {
            let mut acc = 0.0;
            for i in 0..m {
                if artificial_of_row[i] != usize::MAX {
                    acc += t[i][j];
                }
            }
            t[m][j] = -acc;
        }
        for k in 0..n_art {
            t[m][art_base + k] = 0.0;
        }
        if !run_simplex(&mut t, &mut basis, m, ncols, art_base) {
            // phase 1 objective is bounded by construction
            return LpOutcome::Infeasible;
        }
        if t[m][rhs_col] < -1e-7 {
            return LpOutcome::Infeasible;
        }
        // Drive any leftover artificials out of the basis.
        for i in 0..m {
            if basis[i] >= art_base {
                if let Some(j) = (0..art_base).find(|&j| t[i][j].abs() > EPS) {
                    pivot(&mut t, &mut basis, i, j, m, ncols);
                }
            }
        }
    }

    // Phase 2 objective: reduced costs for maximize c·(u - w).
    for j in 0..ncols {
        t[m][j] = 0.0;
    }
    for j in 0..n {
        t[m][j] = -c[j];
        t[m][n + j] = c[j];
    }
    // Make the objective row consistent with the current basis.
    for i in 0..m {
        let bj = basis[i];
        let coef = t[m][bj];
        if coef.abs() > 0.0 {
            for j in 0..ncols {
                let delta = coef * t[i][j];
                t[m][j] -= delta;
            }
        }
    }

    if !run_simplex(&mut t, &mut basis, m, ncols, art_base) {
        return LpOutcome::Unbounded;
    }

    let mut x = DVector::zeros(n);
    for i in 0..m {
        let bj = basis[i];
        if bj < n {
            x[bj] += t[i][rhs_col];
        } else if bj < 2 * n {
            x[bj - n] -= t[i][rhs_col];
        }
    }
    let value = c.dot(&x);
    LpOutcome::Optimal { x, value }
}

/// Bland's-rule simplex on the tableau; returns false on unboundedness.
/// Columns `>= art_limit` (artificials) are never allowed to enter.
fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    m: usize,
    ncols: usize,
    art_limit: usize,
) -> bool {
    let rhs_col = ncols - 1;
    let max_pivots = 200 * (m + ncols);
    for _ in 0..max_pivots {
        // entering: first column with negative reduced cost (Bland)
        let enter = (0..art_limit).find(|&j| t[m][j] < -EPS);
        let enter = match enter {
            Some(j) => j,
            None => return true,
        };
        // leaving: min ratio, ties broken by smallest basis index (Bland)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][rhs_col] / t[i][enter];
                if ratio < best - EPS
                    || (ratio < best + EPS && leave.is_none_or(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = match leave {
            Some(i) => i,
            None => return false, // unbounded
        };
        pivot(t, basis, leave, enter, m, ncols);
    }
    // Cycling should be impossible with Bland's rule; treat as failure.
    false
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, m: usize, ncols: usize) {
    let piv = t[row][col];
    for j in 0..ncols {
        t[row][j] /= piv;
    }
    for i in 0..=m {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for j in 0..ncols {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
    }
    basis[row] = col;
}
