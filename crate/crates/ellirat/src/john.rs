//! The optimal level `t₀`, the John ellipsoid `E(f) = E_{t₀}(f)^{t₀‖f‖∞}`,
//! the integral ratio, John-position normalization, and the extremal
//! comparisons against the truncated-gauge maximizer family.
//!
//! `φ_f(t) = t‖f‖∞|E_t(f)|` is log-concave along `t = e^{-s}`, so the level
//! search is a golden-section maximization of `log φ(e^{-s})` on `s ∈ [0, n]`
//! (the optimal level always satisfies `t₀ ≥ e^{-n}`), warm-starting each
//! inscribed-ellipsoid solve from the neighboring level.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::bodies::{cube, regular_simplex};
use crate::geometry::{AffineMap, Ellipsoid, Matrix};
use crate::logconcave::LogConcaveFn;
use crate::mvie::{self, CertificateReport, MvieSolution};
use crate::quad;
use crate::special::poly_exp_moment;

/// Default tolerance of the level search in `s = -log t`.
pub const DEFAULT_TOL_S: f64 = 1e-5;

/// One sampled point of the `log φ` curve.
#[derive(Debug, Clone, Copy)]
pub struct TraceEntry {
    pub s: f64,
    pub log_phi: f64,
    /// `|E_{e^{-s}}(f)|`; zero on degenerate levels.
    pub volume: f64,
}

/// Result of the optimal-level search.
#[derive(Debug, Clone)]
pub struct JohnResult {
    pub t0: f64,
    /// `E_{t₀}(f)`, the inscribed ellipsoid of the optimal level set.
    pub ellipsoid: Ellipsoid,
    pub phi_at_t0: f64,
    pub integral_ratio: f64,
    pub trace: Vec<TraceEntry>,
}

/// `φ_f(t) = t·‖f‖∞·|E_t(f)|`; zero for degenerate level sets.
pub fn phi(f: &LogConcaveFn, t: f64) -> Result<f64> {
    let level = f.level_set(t)?;
    if level.is_degenerate() {
        return Ok(0.0);
    }
    let sol = mvie::mvie(&level, false, 1e-9)?;
    Ok(t * f.height() * sol.ellipsoid.volume())
}

/// Warm-started evaluator of `log φ(e^{-s})` that caches every solve.
struct PhiCurve<'a> {
    f: &'a LogConcaveFn,
    solves: Vec<(f64, MvieSolution)>,
    trace: Vec<TraceEntry>,
}

impl<'a> PhiCurve<'a> {
    fn new(f: &'a LogConcaveFn) -> Self {
        Self {
            f,
            solves: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn eval(&mut self, s: f64) -> Result<f64> {
        if let Some(e) = self.trace.iter().find(|e| (e.s - s).abs() < 1e-14) {
            return Ok(e.log_phi);
        }
        let t = (-s).exp();
        let level = self.f.level_set(t)?;
        if level.is_degenerate() {
            self.trace.push(TraceEntry {
                s,
                log_phi: f64::NEG_INFINITY,
                volume: 0.0,
            });
            return Ok(f64::NEG_INFINITY);
        }
        let warm = self
            .solves
            .iter()
            .min_by(|a, b| (a.0 - s).abs().total_cmp(&(b.0 - s).abs()))
            .map(|(_, sol)| sol.clone());
        let sol = mvie::mvie_warm(&level, false, 1e-9, warm.as_ref())?;
        let volume = sol.ellipsoid.volume();
        let log_phi = -s + self.f.height().ln() + volume.ln();
        self.solves.push((s, sol));
        self.trace.push(TraceEntry { s, log_phi, volume });
        Ok(log_phi)
    }

    fn solution_at(&self, s: f64) -> Option<&MvieSolution> {
        self.solves
            .iter()
            .find(|(x, _)| (x - s).abs() < 1e-14)
            .map(|(_, sol)| sol)
    }
}

/// Golden-section maximization of `log φ(e^{-s})` on `s ∈ [0, n]` followed by
/// one parabolic refinement; endpoint maxima are returned exactly.
pub fn find_t0(f: &LogConcaveFn, tol_s: f64) -> Result<JohnResult> {
    let n = f.dim() as f64;
    let mut curve = PhiCurve::new(f);

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, n);
    curve.eval(a)?;
    curve.eval(b)?;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = curve.eval(x1)?;
    let mut f2 = curve.eval(x2)?;
    while b - a > tol_s {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = curve.eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = curve.eval(x1)?;
        }
    }

    if curve.trace.iter().all(|e| e.log_phi == f64::NEG_INFINITY) {
        return Err(Error::AllLevelsDegenerate);
    }

    let best = |tr: &[TraceEntry]| -> TraceEntry {
        *tr.iter()
            .max_by(|p, q| p.log_phi.total_cmp(&q.log_phi))
            .unwrap()
    };
    let mut star = best(&curve.trace);

    // parabolic refinement through the best point and its neighbors
    let mut sorted = curve.trace.clone();
    sorted.sort_by(|p, q| p.s.total_cmp(&q.s));
    let idx = sorted
        .iter()
        .position(|e| (e.s - star.s).abs() < 1e-14)
        .unwrap();
    if idx > 0 && idx + 1 < sorted.len() {
        let (l, c, r) = (sorted[idx - 1], sorted[idx], sorted[idx + 1]);
        if l.log_phi.is_finite() && r.log_phi.is_finite() {
            let denom =
                (c.s - l.s) * (c.log_phi - r.log_phi) - (c.s - r.s) * (c.log_phi - l.log_phi);
            if denom.abs() > 1e-300 {
                let num = (c.s - l.s).powi(2) * (c.log_phi - r.log_phi)
                    - (c.s - r.s).powi(2) * (c.log_phi - l.log_phi);
                let cand = c.s - 0.5 * num / denom;
                if cand > l.s && cand < r.s && (cand - c.s).abs() > 1e-14 {
                    curve.eval(cand)?;
                    star = best(&curve.trace);
                }
            }
        }
    }

    // endpoint snapping: an increasing log φ at t = 1 means t₀ = 1 exactly
    let at_zero = curve
        .trace
        .iter()
        .find(|e| e.s == 0.0)
        .copied()
        .expect("endpoint evaluated");
    if star.s <= 2.0 * tol_s.max(1e-12)
        && at_zero.log_phi >= star.log_phi - 1e-9 * (1.0 + star.log_phi.abs())
    {
        star = at_zero;
    }

    let s_star = star.s;
    curve.eval(s_star)?;
    let sol = curve
        .solution_at(s_star)
        .ok_or(Error::AllLevelsDegenerate)?;
    let t0 = (-s_star).exp();
    let phi_at_t0 = t0 * f.height() * sol.ellipsoid.volume();
    let integral = f.integral()?;
    let integral_ratio = (integral / phi_at_t0).powf(1.0 / n);

    let mut trace = curve.trace.clone();
    trace.sort_by(|p, q| p.s.total_cmp(&q.s));
    Ok(JohnResult {
        t0,
        ellipsoid: sol.ellipsoid.clone(),
        phi_at_t0,
        integral_ratio,
        trace,
    })
}

/// `I.rat(f) = (∫f / max_t φ_f(t))^{1/n}`.
pub fn integral_ratio(f: &LogConcaveFn) -> Result<f64> {
    Ok(find_t0(f, DEFAULT_TOL_S)?.integral_ratio)
}

/// Affine map sending `E_{t₀}(f)` to the unit ball, together with the
/// normalized function `f_norm = f ∘ N⁻¹` whose John ellipsoid is
/// `(B₂ⁿ)^{t₀‖f‖∞}`.
pub fn john_position_normalize(f: &LogConcaveFn) -> Result<(AffineMap, LogConcaveFn)> {
    let jr = find_t0(f, DEFAULT_TOL_S)?;
    let inverse = AffineMap::new(jr.ellipsoid.shape().clone(), jr.ellipsoid.center().clone());
    let f_norm = f.precompose_affine(&inverse)?;
    Ok((inverse.inverse()?, f_norm))
}

/// Growth-bound report: `|E_t(f)| ≤ (1 − (1/n)·log(t/t₀))ⁿ |E_{t₀}(f)|`
/// sampled on log-spaced levels.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub t0: f64,
    pub samples: usize,
    /// Max of `|E_t| − bound(t)` (positive values violate the corollary).
    pub max_violation: f64,
    /// Max of `||E_t| − bound(t)|`; near zero exactly for the
    /// truncated-gauge family, whose levels are exact dilates.
    pub max_abs_gap: f64,
}

/// Evaluate the growth bound on `samples` log-spaced levels `t = e^{-s}`,
/// `s ∈ [0, n]`. The function should be in John position (the bound is
/// affine invariant, so this is a normalization, not a restriction).
pub fn corollary_growth_check(f: &LogConcaveFn, samples: usize) -> Result<GrowthReport> {
    let n = f.dim() as f64;
    let jr = find_t0(f, DEFAULT_TOL_S)?;
    let vol0 = jr.ellipsoid.volume();
    let mut curve = PhiCurve::new(f);
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_abs_gap: f64 = 0.0;
    for i in 0..samples {
        let s = n * i as f64 / (samples - 1).max(1) as f64;
        curve.eval(s)?;
        let entry = curve
            .trace
            .iter()
            .find(|e| (e.s - s).abs() < 1e-14)
            .copied()
            .unwrap();
        let t = (-s).exp();
        let factor = 1.0 - (t / jr.t0).ln() / n;
        let bound = factor.max(0.0).powi(f.dim() as i32) * vol0;
        let gap = entry.volume - bound;
        max_violation = max_violation.max(gap);
        max_abs_gap = max_abs_gap.max(gap.abs());
    }
    Ok(GrowthReport {
        t0: jr.t0,
        samples,
        max_violation,
        max_abs_gap,
    })
}

/// Volume ratio of the canonical extremal body: the regular simplex, or the
/// cube in the even case. Computed by the inscribed-ellipsoid solver and
/// cached per (dimension, symmetry).
pub fn canonical_volume_ratio(n: usize, symmetric: bool) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(n, symmetric)) {
        return Ok(*v);
    }
    let body = if symmetric {
        cube(n)
    } else {
        regular_simplex(n)
    };
    let sol = mvie::mvie(&body, symmetric, 1e-10)?;
    let vrat = (body.volume()? / sol.ellipsoid.volume()).powf(1.0 / n as f64);
    cache.lock().unwrap().insert((n, symmetric), vrat);
    Ok(vrat)
}

/// Integral ratio of the extremal function `f_{K,t₀}` with `K = Δⁿ` (or the
/// cube when `symmetric`): `v.rat(K)·(∫_{log t₀}^∞ (1 + s/n)ⁿ e^{-s} ds)^{1/n}`.
///
/// The s-integral runs through quadrature plus an exact polynomial tail; the
/// binomial closed form serves as the test oracle.
pub fn maximizer_irat(n: usize, t0: f64, symmetric: bool) -> Result<f64> {
    let nf = n as f64;
    if !(t0 <= 1.0 + 1e-12 && t0 >= (-nf).exp() - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "t0 = {t0} outside [e^-n, 1]"
        )));
    }
    let vrat = canonical_volume_ratio(n, symmetric)?;
    let lo = t0.min(1.0).ln();
    let hi = 40.0;
    let body = quad::integrate(
        |s| (1.0 + s / nf).powi(n as i32) * (-s).exp(),
        lo,
        hi,
        1e-12,
        1e-15,
    );
    let tail = (-hi).exp() * nf.powi(-(n as i32)) * poly_exp_moment(nf + hi, n);
    Ok(vrat * (body.value + tail).powf(1.0 / nf))
}

/// Comparison of `I.rat(f)` against the maximizer bound of its own `t₀`.
#[derive(Debug, Clone)]
pub struct MaximalityReport {
    pub integral_ratio: f64,
    pub t0: f64,
    pub even: bool,
    pub bound: f64,
    /// `bound − I.rat(f)`; nonnegative up to numerical slack.
    pub slack: f64,
}

pub fn maximality_check(f: &LogConcaveFn) -> Result<MaximalityReport> {
    let jr = find_t0(f, DEFAULT_TOL_S)?;
    let even = f.is_even(1e-9);
    let bound = maximizer_irat(f.dim(), jr.t0, even)?;
    Ok(MaximalityReport {
        integral_ratio: jr.integral_ratio,
        t0: jr.t0,
        even,
        bound,
        slack: bound - jr.integral_ratio,
    })
}

/// Full certificate pipeline: normalize to John position, re-solve the
/// optimal level, extract the decomposition-of-identity weights and the
/// inradius-derivative interval.
pub fn certify_function(f: &LogConcaveFn, tol: f64) -> Result<(JohnResult, CertificateReport)> {
    let (_, f_norm) = john_position_normalize(f)?;
    let jr = find_t0(&f_norm, DEFAULT_TOL_S)?;
    let level = f_norm.level_set(jr.t0)?;
    let sol = mvie::mvie(&level, false, 1e-10)?;
    let mut cert = mvie::john_certificate(&level, &sol, tol)?;
    cert.inradius_derivative_interval =
        Some(mvie::inradius_derivative_interval(&f_norm, jr.t0, 1e-4)?);
    Ok((jr, cert))
}

/// Deviation of an ellipsoid from the unit ball, `max(‖c‖, ‖T − I‖)`.
pub fn unit_ball_deviation(e: &Ellipsoid) -> f64 {
    let n = e.dim();
    let center: f64 = e.center().norm();
    let shape = (e.shape() - Matrix::identity(n, n)).norm();
    center.max(shape)
}

/// Convenience: the extremal function `f_{K,t₀}` over a canonical body.
pub fn extremal_function(n: usize, t0: f64, symmetric: bool) -> Result<LogConcaveFn> {
    let body = if symmetric {
        cube(n)
    } else {
        regular_simplex(n)
    };
    LogConcaveFn::truncated_gauge(1.0, body, t0)
}

/// Evaluates φ at a batch of levels; used by the φ-curve CSV output.
pub fn phi_curve(f: &LogConcaveFn, s_values: &[f64]) -> Result<Vec<TraceEntry>> {
    let mut curve = PhiCurve::new(f);
    for &s in s_values {
        curve.eval(s)?;
    }
    let mut out = curve.trace.clone();
    out.sort_by(|p, q| p.s.total_cmp(&q.s));
    Ok(out)
}
