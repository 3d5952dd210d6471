//! Maximum-volume inscribed ellipsoid (John ellipsoid) of an H-polytope.
//!
//! The program is `max log det E` over ellipsoids `c + E·B₂ⁿ` subject to
//! `‖Eᵀ a_i‖ + ⟨a_i, c⟩ ≤ b_i`, parametrized by the lower-triangular factor
//! `E = L` with positive diagonal. It is solved by a log-barrier interior
//! path with damped Newton recentering; the barrier is self-concordant, so
//! steps are chosen from the Newton decrement alone and no line search on
//! the (large, noisy at high `t`) objective value is needed.
//!
//! The solve is deterministic: fixed initial point (Chebyshev ball), fixed
//! barrier schedule, no randomness.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{sym_sqrt, Ellipsoid, HPolytope, Matrix, Vector};
use crate::logconcave::LogConcaveFn;
use crate::nnls;

/// Relative slack threshold marking a constraint row as active.
const CONTACT_SLACK: f64 = 1e-6;

/// Solution of the inscribed-ellipsoid program.
#[derive(Debug, Clone)]
pub struct MvieSolution {
    pub ellipsoid: Ellipsoid,
    /// Touching directions `T a_i / ‖T a_i‖`: unit vectors that lie on the
    /// boundary of the normalized body `T⁻¹(K − c)`.
    pub contact_points: Vec<Vector>,
    pub active_rows: Vec<usize>,
    /// `log det T` of the optimal shape.
    pub objective: f64,
    pub iterations: usize,
    /// Final first-order optimality measure (duality-gap estimate).
    pub kkt_residual: f64,
    /// Whether the solve pinned the center at the origin.
    pub symmetric: bool,
}

/// Decomposition-of-identity certificate extracted from contact points.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub weights: Vec<f64>,
    /// Frobenius norm of `Σ w_j u_j⊗u_j − I_n`.
    pub identity_residual: f64,
    /// Norm of `Σ w_j u_j` (must vanish in the non-symmetric case).
    pub barycenter_residual: f64,
    /// `t₀ · (d/dt⁺ r(K_t), d/dt⁻ r(K_t))` at `t₀`, when computed through
    /// the level-set pipeline; `lo = -∞` when the right derivative does not
    /// exist (`t₀ = 1`).
    pub inradius_derivative_interval: Option<(f64, f64)>,
    pub passed: bool,
}

/// Maximum-volume inscribed ellipsoid of `k`.
///
/// With `symmetric` the polytope must be origin-symmetric (rows pair up
/// within 1e-9) and the center is fixed at the origin.
pub fn mvie(k: &HPolytope, symmetric: bool, tol: f64) -> Result<MvieSolution> {
    mvie_warm(k, symmetric, tol, None)
}

/// As [`mvie`], warm-started from a previous solution (typically the solve
/// of a nearby level set).
pub fn mvie_warm(
    k: &HPolytope,
    symmetric: bool,
    tol: f64,
    warm: Option<&MvieSolution>,
) -> Result<MvieSolution> {
    if k.is_degenerate() {
        return Err(Error::EmptyInterior);
    }
    let n = k.dim();
    if symmetric && !k.is_origin_symmetric(1e-9) {
        return Err(Error::NotSymmetric);
    }

    // Normalize to unit Chebyshev radius around the Chebyshev center; the
    // barrier then starts from a well-conditioned ball regardless of the
    // level-set scale.
    let (center0, radius0) = if symmetric {
        (Vector::zeros(n), k.centered_inradius()?)
    } else {
        k.chebyshev_center()?
    };
    if radius0 <= 1e-13 {
        return Err(Error::EmptyInterior);
    }
    let rows: Vec<(Vector, f64)> = k
        .rows()
        .iter()
        .map(|r| {
            (
                r.normal.clone(),
                (r.offset - r.normal.dot(&center0)) / radius0,
            )
        })
        .collect();
    let m = rows.len();

    let nc = if symmetric { 0 } else { n };
    let nl = n * (n + 1) / 2;
    let dims = nc + nl;
    let li = |p: usize, q: usize| nc + p * (p + 1) / 2 + q;

    // initial iterate: warm start mapped into normalized coordinates, or
    // the shrunken Chebyshev ball
    let mut c = Vector::zeros(n);
    let mut l = Matrix::identity(n, n) * 0.9;
    if let Some(w) = warm {
        let wc = (w.ellipsoid.center() - &center0) / radius0;
        let wt = w.ellipsoid.shape() / radius0;
        if let Some(chol) = (&wt * wt.transpose()).cholesky() {
            let wl = chol.l();
            let ok_center = rows.iter().all(|(a, b)| b - a.dot(&wc) > 1e-12);
            if ok_center && !symmetric {
                let gamma = rows
                    .iter()
                    .map(|(a, b)| (b - a.dot(&wc)) / (wl.transpose() * a).norm().max(1e-300))
                    .fold(f64::INFINITY, f64::min);
                if gamma > 1e-6 {
                    c = wc;
                    l = wl * (0.95 * gamma.min(1.0));
                }
            } else if symmetric {
                let gamma = rows
                    .iter()
                    .map(|(a, b)| b / (wl.transpose() * a).norm().max(1e-300))
                    .fold(f64::INFINITY, f64::min);
                if gamma > 1e-6 {
                    l = wl * (0.95 * gamma.min(1.0));
                }
            }
        }
    }

    let slacks = |c: &Vector, l: &Matrix| -> Vec<f64> {
        rows.iter()
            .map(|(a, b)| b - a.dot(c) - (l.transpose() * a).norm())
            .collect()
    };
    debug_assert!(slacks(&c, &l).iter().all(|&s| s > 0.0));

    // solution assembly in original coordinates, shared by the success path
    // and the best-iterate report of a capped solve
    let assemble = |c: &Vector, l: &Matrix, t: f64, iterations: usize| -> Result<MvieSolution> {
        let shape_norm = sym_sqrt(&(l * l.transpose()))?;
        let shape = &shape_norm * radius0;
        let center = &center0 + c * radius0;
        let ellipsoid = Ellipsoid::new(center.clone(), shape.clone())?;
        let mut contact_points = Vec::new();
        let mut active_rows = Vec::new();
        for (i, r) in k.rows().iter().enumerate() {
            let slack = r.offset - r.normal.dot(&center) - (&shape * &r.normal).norm();
            if slack <= CONTACT_SLACK * (1.0 + r.offset.abs()) {
                active_rows.push(i);
                let u = &shape * &r.normal;
                contact_points.push(u.normalize());
            }
        }
        let objective = l.diagonal().iter().map(|d| d.ln()).sum::<f64>() + n as f64 * radius0.ln();
        Ok(MvieSolution {
            ellipsoid,
            contact_points,
            active_rows,
            objective,
            iterations,
            kkt_residual: m as f64 / t,
            symmetric,
        })
    };

    let gap_target = (0.01 * tol).max(1e-12);
    let max_iterations = 600usize;
    let mut iterations = 0usize;
    let mut t = 1.0f64;
    let mut grad = DVector::<f64>::zeros(dims);
    let mut hess = DMatrix::<f64>::zeros(dims, dims);

    loop {
        // Newton recentering at this barrier weight
        for _ in 0..80 {
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NoConvergence {
                    iterations,
                    kkt_residual: m as f64 / t,
                    best: Box::new(assemble(&c, &l, t, iterations)?),
                });
            }
            grad.fill(0.0);
            hess.fill(0.0);
            for p in 0..n {
                let d = l[(p, p)];
                grad[li(p, p)] += -t / d;
                hess[(li(p, p), li(p, p))] += t / (d * d);
            }
            for (a, b) in &rows {
                let u = l.transpose() * a;
                let g = u.norm();
                let s = b - a.dot(&c) - g;
                // gradient of -log s and its Hessian
                let mut d = DVector::<f64>::zeros(dims);
                for j in 0..nc {
                    d[j] = a[j];
                }
                for p in 0..n {
                    for q in 0..=p {
                        d[li(p, q)] = a[p] * u[q] / g;
                    }
                }
                let inv_s = 1.0 / s;
                grad.axpy(inv_s, &d, 1.0);
                for i2 in 0..dims {
                    let di = d[i2] * inv_s * inv_s;
                    if di == 0.0 {
                        continue;
                    }
                    for j2 in 0..dims {
                        hess[(i2, j2)] += di * d[j2];
                    }
                }
                // curvature of g itself: (δ_{qw} a_p a_r − d_pq d_rw) / g
                for p in 0..n {
                    for q in 0..=p {
                        for r in 0..n {
                            for w in 0..=r {
                                if q == w {
                                    hess[(li(p, q), li(r, w))] += a[p] * a[r] / g * inv_s;
                                }
                                hess[(li(p, q), li(r, w))] -=
                                    (a[p] * u[q]) * (a[r] * u[w]) / (g * g * g) * inv_s;
                            }
                        }
                    }
                }
            }

            let chol = match hess.clone().cholesky() {
                Some(ch) => ch,
                None => {
                    let ridge = 1e-12 * hess.diagonal().amax().max(1.0);
                    let mut h2 = hess.clone();
                    for i in 0..dims {
                        h2[(i, i)] += ridge;
                    }
                    h2.cholesky().ok_or_else(|| {
                        Error::Numerical("barrier Hessian not positive definite".into())
                    })?
                }
            };
            let step = -chol.solve(&grad);
            let lambda_sq: f64 = -grad.dot(&step);
            if lambda_sq <= 2e-8 {
                break;
            }
            let lambda = lambda_sq.max(0.0).sqrt();
            let mut alpha = if lambda > 0.25 {
                1.0 / (1.0 + lambda)
            } else {
                1.0
            };
            // feasibility backtracking (float safety; self-concordance makes
            // the damped step feasible in exact arithmetic)
            for _ in 0..60 {
                let (c2, l2) = apply_step(&c, &l, &step, alpha, nc, n, li);
                let ok = l2.diagonal().iter().all(|&d| d > 0.0)
                    && slacks(&c2, &l2).iter().all(|&s| s > 0.0);
                if ok {
                    c = c2;
                    l = l2;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if m as f64 / t <= gap_target {
            break;
        }
        t *= 8.0;
    }

    assemble(&c, &l, t, iterations)
}

fn apply_step(
    c: &Vector,
    l: &Matrix,
    step: &DVector<f64>,
    alpha: f64,
    nc: usize,
    n: usize,
    li: impl Fn(usize, usize) -> usize,
) -> (Vector, Matrix) {
    let mut c2 = c.clone();
    for j in 0..nc {
        c2[j] += alpha * step[j];
    }
    let mut l2 = l.clone();
    for p in 0..n {
        for q in 0..=p {
            l2[(p, q)] += alpha * step[li(p, q)];
        }
    }
    (c2, l2)
}

/// Check the John decomposition at the solution's contact points: solve a
/// nonnegative least-squares problem for weights `w ≥ 0` with
/// `Σ w_j u_j⊗u_j = I_n` and `Σ w_j u_j = 0`, and report the residuals.
pub fn john_certificate(_k: &HPolytope, sol: &MvieSolution, tol: f64) -> Result<CertificateReport> {
    let n = sol.ellipsoid.dim();
    let us = &sol.contact_points;
    if us.len() < n {
        return Err(Error::TooFewContacts {
            found: us.len(),
            needed: n,
        });
    }
    let sym_rows = n * (n + 1) / 2;
    let mut a = DMatrix::<f64>::zeros(sym_rows + n, us.len());
    let mut y = DVector::<f64>::zeros(sym_rows + n);
    for (k, u) in us.iter().enumerate() {
        let mut r = 0;
        for i in 0..n {
            for j in i..n {
                // √2 off-diagonal weighting makes the residual of the
                // vectorized system equal the Frobenius norm
                let w = if i == j {
                    1.0
                } else {
                    std::f64::consts::SQRT_2
                };
                a[(r, k)] = w * u[i] * u[j];
                r += 1;
            }
        }
        for i in 0..n {
            a[(sym_rows + i, k)] = u[i];
        }
    }
    let mut r = 0;
    for i in 0..n {
        for j in i..n {
            y[r] = if i == j { 1.0 } else { 0.0 };
            r += 1;
        }
    }
    let weights = nnls::nnls(&a, &y);

    let mut sum_outer = DMatrix::<f64>::zeros(n, n);
    let mut sum_vec = DVector::<f64>::zeros(n);
    for (k, u) in us.iter().enumerate() {
        sum_outer.syger(weights[k], u, u, 1.0);
        sum_vec.axpy(weights[k], u, 1.0);
    }
    for i in 0..n {
        for j in 0..i {
            sum_outer[(j, i)] = sum_outer[(i, j)];
        }
    }
    let identity_residual = (&sum_outer - DMatrix::<f64>::identity(n, n)).norm();
    let barycenter_residual = sum_vec.norm();
    let passed = identity_residual <= tol && (sol.symmetric || barycenter_residual <= tol);
    Ok(CertificateReport {
        weights: weights.iter().cloned().collect(),
        identity_residual,
        barycenter_residual,
        inradius_derivative_interval: None,
        passed,
    })
}

/// One-sided derivative interval `t₀·(d/dt⁺ r(K_t), d/dt⁻ r(K_t))|_{t₀}` of
/// the centered inradius of the level sets, computed in the frame where
/// `E_{t₀}(f)` is the unit ball.
///
/// `h` is the relative finite-difference step; a Richardson check at `h/2`
/// widens the interval when the two estimates disagree by more than 10%.
/// At `t₀ = 1` the right derivative does not exist and the lower endpoint
/// is the sentinel `-∞`.
pub fn inradius_derivative_interval(f: &LogConcaveFn, t0: f64, h: f64) -> Result<(f64, f64)> {
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(Error::InvalidArgument(format!("t0 = {t0} outside (0, 1]")));
    }
    let k0 = f.level_set(t0)?;
    if k0.is_degenerate() {
        return Err(Error::EmptyLevel { t: t0 });
    }
    let sol = mvie(&k0, false, 1e-10)?;
    let (lin, off) = sol.ellipsoid.map_to_unit_ball()?;

    let r_of = |t: f64| -> Result<f64> {
        let level = f.level_set(t)?;
        if level.is_degenerate() {
            return Err(Error::EmptyLevel { t });
        }
        let mapped = level.affine_image(&lin, &off)?;
        mapped.centered_inradius()
    };
    let r0 = r_of(t0)?;

    let quotient = |t1: f64| -> Result<f64> {
        let r1 = r_of(t1)?;
        Ok((r1 - r0) / (t1 - t0))
    };
    let one_sided = |sign: f64| -> Result<(f64, f64)> {
        let d_full = quotient(t0 * (1.0 + sign * h))?;
        let d_half = quotient(t0 * (1.0 + sign * 0.5 * h))?;
        let extrap = 2.0 * d_half - d_full;
        let mismatch = (d_half - d_full).abs();
        let widen = if mismatch > 0.1 * extrap.abs().max(1e-6) {
            mismatch
        } else {
            0.0
        };
        Ok((extrap, widen))
    };

    let right_exists = t0 * (1.0 + h) <= 1.0;
    let (left, widen_left) = one_sided(-1.0)?;
    let (mut lo, mut hi);
    if right_exists {
        let (right, widen_right) = one_sided(1.0)?;
        lo = t0 * right - t0 * widen_right;
        hi = t0 * left + t0 * widen_left;
    } else {
        lo = f64::NEG_INFINITY;
        hi = t0 * left + t0 * widen_left;
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    Ok((lo, hi))
}
