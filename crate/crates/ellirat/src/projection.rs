//! Polar projection body `Π*(f)` of a log-concave function, its volume, the
//! co-area gradient norm `‖|∇f|‖₁`, and the affine Sobolev / reverse Petty /
//! entropy inequality reports.
//!
//! The norm is `‖x‖_{Π*(f)} = 2|x|‖f‖∞ ∫₀¹ |P_{x⊥} K_t| dt`. For families
//! with a closed dilation law the t-integral factors into a single base-body
//! shadow times a moment constant; otherwise the shadow integrals share one
//! fixed Gauss–Kronrod grid of level-set vertex clouds, so every direction
//! reuses the same geometry.
//!
//! Spherical averaging is deterministic in n = 2 (uniform angular grid) and
//! n = 3 (Fibonacci sphere point set); n ≥ 4 falls back to seeded Monte
//! Carlo. Direction evaluations may be sharded across threads (capped by
//! `ELLIRAT_THREADS`) with a fixed accumulation order, so results do not
//! depend on the thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{hull, Vector};
use crate::john;
use crate::logconcave::{Exponent, LevelLaw, LogConcaveFn};
use crate::quad::{self, KahanSum};
use crate::special::{binomial, factorial, unit_ball_volume};

/// Default direction counts for the deterministic spherical rules.
const ANGULAR_GRID_2D: usize = 4096;
const FIBONACCI_GRID_3D: usize = 2048;
const MONTE_CARLO_DEFAULT: usize = 4000;

/// Inequality report around `Π*(f)` (Petty-type sandwich and entropy bound).
#[derive(Debug, Clone)]
pub struct PettyReport {
    /// `‖f‖_{n/(n−1)} |Π*(f)|^{1/n} / (|B₂ⁿ| / 2|B₂ⁿ⁻¹|)`; ≤ 1 by the affine
    /// Sobolev inequality, with equality for ellipsoidal indicators.
    pub lhs: f64,
    /// The reverse-inequality lower bound built from the integral ratio.
    pub rhs_lower: f64,
    /// Power entropy `H(f̃)` of the mass-normalized function.
    pub entropy_power: f64,
    /// `(I.rat(f̃)/‖f̃‖_{n/(n−1)})²`, the entropy upper bound.
    pub entropy_bound: f64,
    /// Estimated numerical error of `lhs` (spherical discretization).
    pub mc_error: f64,
}

/// `‖|∇f|‖₁` with a distributional-value flag for indicators.
#[derive(Debug, Clone, Copy)]
pub struct GradL1 {
    pub value: f64,
    /// Set for indicator functions, which are not W^{1,1}; the value is the
    /// perimeter form `‖f‖∞·Per(K)`.
    pub distributional: bool,
}

enum ShadowCache {
    /// `∫₀¹|P K_t|dt = moment · |P K_base|`.
    Scaled { verts: Vec<Vector>, moment: f64 },
    /// Weighted level-set vertex clouds on a fixed s-grid; weights already
    /// include the quadrature weight times `e^{-s}`.
    Generic { nodes: Vec<(f64, Vec<Vector>)> },
}

impl ShadowCache {
    fn build(f: &LogConcaveFn) -> Result<Self> {
        let n = f.dim();
        match f.level_law() {
            LevelLaw::Scaled { body, law, .. } => {
                let verts = body.enumerate_vertices()?.vertices().to_vec();
                Ok(ShadowCache::Scaled {
                    verts,
                    moment: law.moment(n - 1),
                })
            }
            LevelLaw::Generic => {
                let s_max = shadow_truncation_point(f)?;
                let grid = quad::fixed_grid(0.0, s_max, 24);
                let mut nodes = Vec::with_capacity(grid.len());
                for (s, w) in grid {
                    let level = f.level_set((-s).exp())?;
                    if level.is_degenerate() {
                        nodes.push((0.0, Vec::new()));
                        continue;
                    }
                    let verts = level.enumerate_vertices()?.vertices().to_vec();
                    nodes.push((w * (-s).exp(), verts));
                }
                Ok(ShadowCache::Generic { nodes })
            }
        }
    }

    /// `∫₀¹ |P_{u⊥} K_t| dt` for a unit direction `u`.
    fn shadow_integral(&self, u: &Vector) -> f64 {
        match self {
            ShadowCache::Scaled { verts, moment } => moment * shadow_volume(verts, u),
            ShadowCache::Generic { nodes } => {
                let mut acc = KahanSum::default();
                for (w, verts) in nodes {
                    if !verts.is_empty() {
                        acc.add(w * shadow_volume(verts, u));
                    }
                }
                acc.value()
            }
        }
    }
}

/// (n−1)-volume of the shadow of a vertex cloud on `u⊥`.
fn shadow_volume(verts: &[Vector], u: &Vector) -> f64 {
    let n = u.len();
    if n == 1 {
        // the shadow on a 0-dimensional space is a point
        return if verts.is_empty() { 0.0 } else { 1.0 };
    }
    if n == 2 {
        // width along the rotated direction
        let b0 = -u[1];
        let b1 = u[0];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in verts {
            let p = b0 * v[0] + b1 * v[1];
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (hi - lo).max(0.0)
    } else {
        let basis = hull::orthonormal_complement(u);
        let projected: Vec<Vector> = verts.iter().map(|v| basis.transpose() * v).collect();
        hull::hull_volume(&projected, n - 1)
    }
}

/// Truncation point for generic shadow/perimeter integrals: the circumradius
/// of the level sets grows concavely in `s`, so the tail is dominated by a
/// polynomial-times-exponential with a closed form.
fn shadow_truncation_point(f: &LogConcaveFn) -> Result<f64> {
    let n = f.dim();
    let radius = |s: f64| -> Result<f64> {
        let level = f.level_set((-s).exp())?;
        if level.is_degenerate() {
            return Ok(0.0);
        }
        Ok(level
            .enumerate_vertices()?
            .vertices()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    };
    let mut s_max = 8.0 + 2.0 * n as f64;
    let scale_ref = radius(1.0)?.max(1e-6).powi((n - 1) as i32);
    for _ in 0..60 {
        let r2 = radius(s_max)?;
        let r1 = radius(0.75 * s_max)?;
        let slope = ((r2 - r1) / (0.25 * s_max)).max(0.0);
        let mut tail = 0.0;
        for k in 0..n {
            tail += binomial(n - 1, k)
                * r2.powi((n - 1 - k) as i32)
                * slope.powi(k as i32)
                * ((1.0 + s_max) * factorial(k) + factorial(k + 1));
        }
        tail *= unit_ball_volume(n - 1) * (-s_max).exp();
        if tail <= 1e-12 * scale_ref {
            return Ok(s_max);
        }
        s_max *= 1.4;
    }
    Err(Error::TailNotConverged {
        remaining: f64::INFINITY,
    })
}

/// `‖x‖_{Π*(f)} = 2|x|‖f‖∞ ∫₀¹ |P_{x⊥}K_t| dt`.
pub fn pp_norm(f: &LogConcaveFn, x: &Vector) -> Result<f64> {
    let len = x.norm();
    if len <= 1e-14 {
        return Err(Error::ZeroDirection);
    }
    let cache = ShadowCache::build(f)?;
    Ok(2.0 * len * f.height() * cache.shadow_integral(&(x / len)))
}

/// Volume of the polar projection body together with an error estimate:
/// `|Π*(f)| = |B₂ⁿ| ∫_{S^{n−1}} ‖θ‖^{-n} dσ(θ)`.
///
/// `samples = 0` selects the per-dimension default; `seed` only affects the
/// Monte Carlo path used for `n ≥ 4`.
pub fn pp_volume(f: &LogConcaveFn, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = f.dim();
    if n < 2 {
        return Err(Error::DimensionUnsupported { dim: n });
    }
    let cache = ShadowCache::build(f)?;
    let height = f.height();
    let monte_carlo = n >= 4;

    let directions: Vec<Vector> = if n == 2 {
        let m = if samples > 0 {
            samples
        } else {
            ANGULAR_GRID_2D
        };
        (0..m)
            .map(|k| {
                let th = std::f64::consts::TAU * (k as f64 + 0.5) / m as f64;
                Vector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect()
    } else if n == 3 {
        let m = if samples > 0 {
            samples
        } else {
            FIBONACCI_GRID_3D
        };
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..m)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * k as f64;
                Vector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
            })
            .collect()
    } else {
        let m = if samples > 0 {
            samples
        } else {
            MONTE_CARLO_DEFAULT
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| loop {
                let v = Vector::from_iterator(n, (0..n).map(|_| normal_sample(&mut rng)));
                let norm = v.norm();
                if norm > 1e-9 {
                    return v / norm;
                }
            })
            .collect()
    };

    let values = parallel_map(directions.len(), |k| {
        let norm = 2.0 * height * cache.shadow_integral(&directions[k]);
        norm.powi(-(n as i32))
    });

    let mut total = KahanSum::default();
    for v in &values {
        total.add(*v);
    }
    let mean = total.value() / values.len() as f64;
    let volume = unit_ball_volume(n) * mean;

    let error = if monte_carlo {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (values.len().saturating_sub(1)).max(1) as f64;
        3.0 * unit_ball_volume(n) * (var / values.len() as f64).sqrt()
    } else {
        // deterministic rules: compare against the half-resolution grid
        let mut half = KahanSum::default();
        for v in values.iter().step_by(2) {
            half.add(*v);
        }
        let half_mean = half.value() / values.iter().step_by(2).count() as f64;
        (unit_ball_volume(n) * (half_mean - mean)).abs() + 1e-12 * volume
    };
    Ok((volume, error))
}

/// `‖|∇f|‖₁` by the co-area identity `‖f‖∞ ∫₀¹ Per(K_t) dt`.
pub fn grad_l1(f: &LogConcaveFn) -> Result<GradL1> {
    let n = f.dim();
    let distributional = matches!(f.exponent(), Exponent::Indicator { .. });
    match f.level_law() {
        LevelLaw::Scaled { body, law, .. } => {
            let per = body.surface_area()?;
            Ok(GradL1 {
                value: f.height() * per * law.moment(n - 1),
                distributional,
            })
        }
        LevelLaw::Generic => {
            let s_max = shadow_truncation_point(f)?;
            let result = quad::integrate(
                |s| {
                    let level = match f.level_set((-s).exp()) {
                        Ok(l) => l,
                        Err(_) => return 0.0,
                    };
                    if level.is_degenerate() {
                        return 0.0;
                    }
                    level.surface_area().unwrap_or(0.0) * (-s).exp()
                },
                0.0,
                s_max,
                1e-9,
                1e-12,
            );
            Ok(GradL1 {
                value: f.height() * result.value,
                distributional,
            })
        }
    }
}

/// Assemble the Petty-type inequality report for `f`.
pub fn petty_report(f: &LogConcaveFn) -> Result<PettyReport> {
    let n = f.dim();
    if n < 2 {
        return Err(Error::DimensionUnsupported { dim: n });
    }
    let nf = n as f64;
    let p = nf / (nf - 1.0);
    let height = f.height();

    let integral = f.integral()?;
    let p_integral = f.p_norm_integral(p)?;
    let p_norm = p_integral.powf(1.0 / p);
    let entropy = f.entropy_integral()?;
    let irat = john::integral_ratio(f)?;

    let (pp_vol, pp_err) = pp_volume(f, 0, 0)?;
    let petty_constant = unit_ball_volume(n) / (2.0 * unit_ball_volume(n - 1));
    let lhs = p_norm * pp_vol.powf(1.0 / nf) / petty_constant;
    let mc_error = lhs * pp_err / (nf * pp_vol) + 1e-9;

    // reverse bound: 1 / (e^{entropy/(n ∫f)} ‖f‖∞^{1/n} (∫f/∫f^p)^{(n−1)/n} I.rat)
    let exponent = entropy / (nf * integral);
    let ratio = integral / p_integral;
    let rhs_lower =
        1.0 / (exponent.exp() * height.powf(1.0 / nf) * ratio.powf((nf - 1.0) / nf) * irat);

    // entropy side, for the mass-normalized function f̃ = f/∫f
    let f_tilde_log = (entropy + integral * height.ln()) / integral - integral.ln();
    let entropy_power = (-2.0 / nf * f_tilde_log).exp();
    let tilde_p_norm = p_norm / integral;
    let entropy_bound = (irat / tilde_p_norm).powi(2);

    Ok(PettyReport {
        lhs,
        rhs_lower,
        entropy_power,
        entropy_bound,
        mc_error,
    })
}

fn normal_sample<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; only the cosine branch is needed
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// Evaluate `eval` at every index, possibly across threads, with the output
/// order fixed by index so downstream accumulation is deterministic.
fn parallel_map<F: Fn(usize) -> f64 + Sync>(count: usize, eval: F) -> Vec<f64> {
    let threads = thread_cap().min(count.max(1));
    if threads <= 1 || count < 256 {
        return (0..count).map(eval).collect();
    }
    let mut out = vec![0.0f64; count];
    let chunk = count.div_ceil(threads);
    std::thread::scope(|scope| {
        for (i, slice) in out.chunks_mut(chunk).enumerate() {
            let eval = &eval;
            scope.spawn(move || {
                for (j, v) in slice.iter_mut().enumerate() {
                    *v = eval(i * chunk + j);
                }
            });
        }
    });
    out
}

/// Worker cap from `ELLIRAT_THREADS`, defaulting to the machine parallelism.
fn thread_cap() -> usize {
    std::env::var("ELLIRAT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .min(64)
}

/// Classical Sobolev slack `‖|∇f|‖₁ − n|B₂ⁿ|^{1/n}‖f‖_{n/(n−1)}`; must be
/// nonnegative for W^{1,1} members of the families.
pub fn sobolev_slack(f: &LogConcaveFn) -> Result<f64> {
    let n = f.dim();
    let nf = n as f64;
    let g = grad_l1(f)?;
    let p_norm = f.p_norm(nf / (nf - 1.0))?;
    Ok(g.value - nf * unit_ball_volume(n).powf(1.0 / nf) * p_norm)
}

#[cfg(test)]
mod tests;
