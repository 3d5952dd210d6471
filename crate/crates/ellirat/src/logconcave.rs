//! Integrable log-concave functions `f = height·e^{-v}` with `v` convex from
//! a closed family, their level sets `K_t(f) = {f ≥ t‖f‖∞}`, and the
//! layer-cake integrals `∫f`, `∫f^p` and `∫f·log(f/‖f‖∞)`.
//!
//! All integrals substitute `t = e^{-s}` and integrate over `s ∈ [0, s_max]`
//! with adaptive Gauss–Kronrod panels; the truncation point is certified by
//! the concavity of `s ↦ |K_{e^{-s}}|^{1/n}`, which bounds the tail by a
//! polynomial-times-exponential integral with a closed form. Closed-form
//! level laws are used where the family admits them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, HPolytope, Vector};
use crate::lp::{self, LpOutcome};
use crate::quad;
use crate::special::{gamma, poly_exp_moment, poly_exp_moment1};

/// Convex exponent families closed under affine maps, powers `v ↦ p·v` and
/// the scaling `v ↦ (1+ε)·v(·/(1+ε))` of the sup-convolution self-product.
#[derive(Debug, Clone)]
pub enum Exponent {
    /// `v = 0` on the body, `+∞` outside.
    Indicator { body: HPolytope },
    /// `v(x) = ‖x − shift‖_body^alpha` with `alpha ≥ 1`.
    GaugePower {
        body: HPolytope,
        alpha: f64,
        shift: Vector,
    },
    /// `v(x) = max{‖x − shift‖_body − plateau, 0}`; constructed from a level
    /// `t₀ ∈ [e^{-n}, 1]` as `plateau = n + log t₀`, but stored by plateau so
    /// the family stays closed under the self-product dilation.
    TruncatedGauge {
        body: HPolytope,
        plateau: f64,
        shift: Vector,
    },
    /// `v(x) = max_i(⟨a_i, x⟩ + b_i)` on the domain, `+∞` outside, with
    /// `min v = 0` enforced at construction by linear programming.
    PiecewiseLinear {
        pieces: Vec<(Vector, f64)>,
        domain: HPolytope,
    },
}

#[derive(Debug, Clone)]
pub struct LogConcaveFn {
    height: f64,
    dim: usize,
    exponent: Exponent,
}

/// Closed-form dilation law of the level sets, `K_{e^{-s}} = shift + scale(s)·body`.
#[derive(Debug, Clone, Copy)]
pub enum ScaleLaw {
    /// Indicator: constant.
    Constant,
    /// Gauge power: `scale(s) = s^{1/alpha}`.
    Power { inv_alpha: f64 },
    /// Truncated gauge: `scale(s) = plateau + s`.
    Plateau { gamma: f64 },
}

impl ScaleLaw {
    pub fn scale(&self, s: f64) -> f64 {
        match *self {
            ScaleLaw::Constant => 1.0,
            ScaleLaw::Power { inv_alpha } => s.max(0.0).powf(inv_alpha),
            ScaleLaw::Plateau { gamma } => gamma + s,
        }
    }

    /// Closed form of `∫₀^∞ scale(s)^k e^{-s} ds`.
    pub fn moment(&self, k: usize) -> f64 {
        match *self {
            ScaleLaw::Constant => 1.0,
            ScaleLaw::Power { inv_alpha } => gamma(1.0 + k as f64 * inv_alpha),
            ScaleLaw::Plateau { gamma } => poly_exp_moment(gamma, k),
        }
    }
}

/// Level-set structure exposed to the projection-body and perimeter
/// integrals: either explicit dilation of a base body, or generic.
pub enum LevelLaw<'a> {
    Scaled {
        body: &'a HPolytope,
        shift: Option<&'a Vector>,
        law: ScaleLaw,
    },
    Generic,
}

impl LogConcaveFn {
    pub fn indicator(height: f64, body: HPolytope) -> Result<Self> {
        check_height(height)?;
        if body.is_degenerate() {
            return Err(Error::EmptyInterior);
        }
        body.bounding_box()?;
        Ok(Self {
            height,
            dim: body.dim(),
            exponent: Exponent::Indicator { body },
        })
    }

    pub fn gauge_power(height: f64, body: HPolytope, alpha: f64, shift: Vector) -> Result<Self> {
        check_height(height)?;
        if alpha.is_nan() || alpha < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "gauge exponent alpha = {alpha} must be ≥ 1"
            )));
        }
        check_gauge_body(&body)?;
        if shift.len() != body.dim() {
            return Err(Error::InvalidArgument("shift dimension mismatch".into()));
        }
        Ok(Self {
            height,
            dim: body.dim(),
            exponent: Exponent::GaugePower { body, alpha, shift },
        })
    }

    /// The truncated-gauge family `e^{-max{‖x‖_K − (n + log t₀), 0}}`.
    pub fn truncated_gauge(height: f64, body: HPolytope, t0: f64) -> Result<Self> {
        let n = body.dim() as f64;
        if !(t0 <= 1.0 && t0 >= (-n).exp() - 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "t0 = {t0} outside [e^-n, 1]"
            )));
        }
        let plateau = (n + t0.ln()).max(0.0);
        let shift = Vector::zeros(body.dim());
        Self::truncated_gauge_raw(height, body, plateau, shift)
    }

    /// Truncated gauge by raw plateau offset; used by affine images and
    /// sup-convolution products, which leave the `[e^{-n}, 1]` range.
    pub fn truncated_gauge_raw(
        height: f64,
        body: HPolytope,
        plateau: f64,
        shift: Vector,
    ) -> Result<Self> {
        check_height(height)?;
        if plateau < 0.0 {
            return Err(Error::InvalidArgument("plateau must be ≥ 0".into()));
        }
        check_gauge_body(&body)?;
        Ok(Self {
            height,
            dim: body.dim(),
            exponent: Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            },
        })
    }

    pub fn piecewise_linear(
        height: f64,
        pieces: Vec<(Vector, f64)>,
        domain: HPolytope,
    ) -> Result<Self> {
        check_height(height)?;
        if pieces.is_empty() {
            return Err(Error::InvalidArgument(
                "piecewise-linear exponent needs at least one piece".into(),
            ));
        }
        if domain.is_degenerate() {
            return Err(Error::EmptyInterior);
        }
        domain.bounding_box()?;
        let n = domain.dim();
        for (a, _) in &pieces {
            if a.len() != n {
                return Err(Error::InvalidArgument("piece dimension mismatch".into()));
            }
        }
        // normalize min v to zero: min z s.t. ⟨a_i,x⟩ + b_i ≤ z on the domain
        let m = pieces.len() + domain.rows().len();
        let mut a_lp = nalgebra::DMatrix::<f64>::zeros(m, n + 1);
        let mut b_lp = DVector::<f64>::zeros(m);
        for (i, (a, b)) in pieces.iter().enumerate() {
            for j in 0..n {
                a_lp[(i, j)] = a[j];
            }
            a_lp[(i, n)] = -1.0;
            b_lp[i] = -b;
        }
        for (i, r) in domain.rows().iter().enumerate() {
            for j in 0..n {
                a_lp[(pieces.len() + i, j)] = r.normal[j];
            }
            b_lp[pieces.len() + i] = r.offset;
        }
        let mut c_lp = DVector::<f64>::zeros(n + 1);
        c_lp[n] = -1.0;
        let v_min = match lp::maximize(&c_lp, &a_lp, &b_lp) {
            LpOutcome::Optimal { value, .. } => -value,
            LpOutcome::Unbounded => return Err(Error::Unbounded),
            LpOutcome::Infeasible => return Err(Error::Infeasible),
        };
        let pieces = pieces
            .into_iter()
            .map(|(a, b)| (a, b - v_min))
            .collect::<Vec<_>>();
        Ok(Self {
            height,
            dim: n,
            exponent: Exponent::PiecewiseLinear { pieces, domain },
        })
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    pub fn with_height(&self, height: f64) -> Self {
        Self {
            height,
            dim: self.dim,
            exponent: self.exponent.clone(),
        }
    }

    /// The convex exponent `v(x)`; `+∞` outside the effective domain.
    pub fn exponent_value(&self, x: &Vector) -> f64 {
        match &self.exponent {
            Exponent::Indicator { body } => {
                if body.contains(x, 1e-12) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Exponent::GaugePower { body, alpha, shift } => {
                let g = body.gauge_norm(&(x - shift)).expect("validated body");
                g.powf(*alpha)
            }
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => {
                let g = body.gauge_norm(&(x - shift)).expect("validated body");
                (g - plateau).max(0.0)
            }
            Exponent::PiecewiseLinear { pieces, domain } => {
                if !domain.contains(x, 1e-12) {
                    return f64::INFINITY;
                }
                pieces
                    .iter()
                    .map(|(a, b)| a.dot(x) + b)
                    .fold(f64::NEG_INFINITY, f64::max)
                    .max(0.0)
            }
        }
    }

    /// `f(x) = height · e^{-v(x)}`.
    pub fn evaluate(&self, x: &Vector) -> f64 {
        let v = self.exponent_value(x);
        if v.is_infinite() {
            0.0
        } else {
            self.height * (-v).exp()
        }
    }

    /// Level set `K_t(f) = {x : f(x) ≥ t‖f‖∞} = {v ≤ -log t}` for `t ∈ (0, 1]`.
    pub fn level_set(&self, t: f64) -> Result<HPolytope> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "level t = {t} outside (0, 1]"
            )));
        }
        let s = -t.ln();
        match &self.exponent {
            Exponent::Indicator { body } => Ok(body.clone()),
            Exponent::GaugePower { body, alpha, shift } => {
                let scale = s.powf(1.0 / alpha);
                Ok(dilate(body, shift, scale))
            }
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => Ok(dilate(body, shift, plateau + s)),
            Exponent::PiecewiseLinear { pieces, domain } => {
                let mut rows: Vec<(Vector, f64)> = domain
                    .rows()
                    .iter()
                    .map(|r| (r.normal.clone(), r.offset))
                    .collect();
                for (a, b) in pieces {
                    rows.push((a.clone(), s - b));
                }
                let level = HPolytope::from_rows(self.dim, rows)?;
                // flat tops give zero-interior levels near t = 1
                let (c, r) = level.chebyshev_center()?;
                if r <= 1e-10 {
                    return Ok(HPolytope::degenerate_point(c));
                }
                Ok(level)
            }
        }
    }

    /// Closed-form level-dilation law, when the family has one.
    pub fn level_law(&self) -> LevelLaw<'_> {
        match &self.exponent {
            Exponent::Indicator { body } => LevelLaw::Scaled {
                body,
                shift: None,
                law: ScaleLaw::Constant,
            },
            Exponent::GaugePower { body, alpha, shift } => LevelLaw::Scaled {
                body,
                shift: Some(shift),
                law: ScaleLaw::Power {
                    inv_alpha: 1.0 / alpha,
                },
            },
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => LevelLaw::Scaled {
                body,
                shift: Some(shift),
                law: ScaleLaw::Plateau { gamma: *plateau },
            },
            Exponent::PiecewiseLinear { .. } => LevelLaw::Generic,
        }
    }

    /// `∫ f = height · ∫₀¹ |K_t| dt`, closed forms where available.
    pub fn integral(&self) -> Result<f64> {
        let n = self.dim;
        match &self.exponent {
            Exponent::Indicator { body } => Ok(self.height * body.volume()?),
            Exponent::GaugePower { body, alpha, .. } => {
                Ok(self.height * body.volume()? * gamma(1.0 + n as f64 / alpha))
            }
            Exponent::TruncatedGauge { body, plateau, .. } => {
                Ok(self.height * body.volume()? * poly_exp_moment(*plateau, n))
            }
            Exponent::PiecewiseLinear { .. } => Ok(self.height * self.layer_cake(Kernel::Exp)?),
        }
    }

    /// Generic quadrature route for `∫ f`, bypassing the closed forms.
    pub fn integral_by_quadrature(&self) -> Result<f64> {
        Ok(self.height * self.layer_cake(Kernel::Exp)?)
    }

    /// `∫ f^p`; `f^p` stays in the family with `height^p` and exponent `p·v`.
    pub fn p_norm_integral(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("p = {p} must be ≥ 1")));
        }
        self.pow(p)?.integral()
    }

    /// `L^p` norm `(∫ f^p)^{1/p}`.
    pub fn p_norm(&self, p: f64) -> Result<f64> {
        Ok(self.p_norm_integral(p)?.powf(1.0 / p))
    }

    /// `f^p` as a member of the same family.
    pub fn pow(&self, p: f64) -> Result<Self> {
        let height = self.height.powf(p);
        let exponent = match &self.exponent {
            Exponent::Indicator { body } => Exponent::Indicator { body: body.clone() },
            Exponent::GaugePower { body, alpha, shift } => Exponent::GaugePower {
                body: body.scale(p.powf(-1.0 / alpha)),
                alpha: *alpha,
                shift: shift.clone(),
            },
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => Exponent::TruncatedGauge {
                body: body.scale(1.0 / p),
                plateau: p * plateau,
                shift: shift.clone(),
            },
            Exponent::PiecewiseLinear { pieces, domain } => Exponent::PiecewiseLinear {
                pieces: pieces.iter().map(|(a, b)| (a * p, b * p)).collect(),
                domain: domain.clone(),
            },
        };
        Ok(Self {
            height,
            dim: self.dim,
            exponent,
        })
    }

    /// `∫ f·log(f/‖f‖∞) = -height·∫ v e^{-v}`, always ≤ 0, via the layer-cake
    /// identity `∫ v e^{-v} = ∫₀^∞ (s-1) e^{-s} |K_{e^{-s}}| ds`.
    pub fn entropy_integral(&self) -> Result<f64> {
        let n = self.dim;
        match &self.exponent {
            Exponent::Indicator { .. } => Ok(0.0),
            Exponent::GaugePower { body, alpha, .. } => {
                let na = n as f64 / alpha;
                Ok(-self.height * body.volume()? * na * gamma(1.0 + na))
            }
            Exponent::TruncatedGauge { body, plateau, .. } => {
                let m0 = poly_exp_moment(*plateau, n);
                let m1 = poly_exp_moment1(*plateau, n);
                Ok(-self.height * body.volume()? * (m1 - m0))
            }
            Exponent::PiecewiseLinear { .. } => self.entropy_by_quadrature(),
        }
    }

    /// Generic quadrature route for the entropy integral.
    pub fn entropy_by_quadrature(&self) -> Result<f64> {
        Ok(-self.height * self.layer_cake(Kernel::Entropy)?)
    }

    /// `∫ f log f = ∫ f log(f/‖f‖∞) + log(height)·∫f`.
    pub fn f_log_f_integral(&self) -> Result<f64> {
        Ok(self.entropy_integral()? + self.height.ln() * self.integral()?)
    }

    /// Pre-composition `f ∘ map` for an invertible affine `map`.
    pub fn precompose_affine(&self, map: &AffineMap) -> Result<Self> {
        let inv = map.inverse()?;
        let exponent = match &self.exponent {
            Exponent::Indicator { body } => Exponent::Indicator {
                body: body.affine_image(&inv.linear, &inv.offset)?,
            },
            Exponent::GaugePower { body, alpha, shift } => Exponent::GaugePower {
                body: body.affine_image(&inv.linear, &Vector::zeros(self.dim))?,
                alpha: *alpha,
                shift: inv.apply(shift),
            },
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => Exponent::TruncatedGauge {
                body: body.affine_image(&inv.linear, &Vector::zeros(self.dim))?,
                plateau: *plateau,
                shift: inv.apply(shift),
            },
            Exponent::PiecewiseLinear { pieces, domain } => {
                let new_pieces: Vec<(Vector, f64)> = pieces
                    .iter()
                    .map(|(a, b)| (map.linear.transpose() * a, b + a.dot(&map.offset)))
                    .collect();
                Exponent::PiecewiseLinear {
                    pieces: new_pieces,
                    domain: domain.affine_image(&inv.linear, &inv.offset)?,
                }
            }
        };
        Ok(Self {
            height: self.height,
            dim: self.dim,
            exponent,
        })
    }

    /// Whether `f` is an even function (up to `tol` on the defining data).
    pub fn is_even(&self, tol: f64) -> bool {
        match &self.exponent {
            Exponent::Indicator { body } => body.is_origin_symmetric(tol),
            Exponent::GaugePower { body, shift, .. }
            | Exponent::TruncatedGauge { body, shift, .. } => {
                body.is_origin_symmetric(tol) && shift.norm() <= tol
            }
            Exponent::PiecewiseLinear { pieces, domain } => {
                domain.is_origin_symmetric(tol)
                    && pieces.iter().all(|(a, b)| {
                        pieces
                            .iter()
                            .any(|(a2, b2)| (a + a2).norm() <= tol && (b - b2).abs() <= tol)
                    })
            }
        }
    }

    /// Local structure of the exponent at a smooth point: enough to evaluate
    /// `v`, `‖∇v‖` and the exact minimum of `v` over small Euclidean balls
    /// through the locally active facet or piece.
    pub(crate) fn local_exponent(&self, z: &Vector) -> Result<LocalExponent> {
        const KINK_TOL: f64 = 1e-8;
        match &self.exponent {
            Exponent::Indicator { body } => {
                let worst = body
                    .rows()
                    .iter()
                    .map(|r| r.normal.dot(z) - r.offset)
                    .fold(f64::NEG_INFINITY, f64::max);
                if worst >= -KINK_TOL {
                    return Err(Error::KinkPoint);
                }
                Ok(LocalExponent::Flat)
            }
            Exponent::GaugePower { body, alpha, shift } => {
                let y = z - shift;
                let g = body.gauge_norm(&y)?;
                if g <= KINK_TOL {
                    if *alpha > 1.0 {
                        return Ok(LocalExponent::Flat);
                    }
                    return Err(Error::KinkPoint);
                }
                let (facet, gap) = body.gauge_active_facet(&y)?;
                if gap <= KINK_TOL * (1.0 + g) {
                    return Err(Error::KinkPoint);
                }
                let rate = 1.0 / body.rows()[facet].offset;
                Ok(LocalExponent::Gauge {
                    gauge: g,
                    rate,
                    alpha: *alpha,
                    plateau: 0.0,
                })
            }
            Exponent::TruncatedGauge {
                body,
                plateau,
                shift,
            } => {
                let y = z - shift;
                let g = body.gauge_norm(&y)?;
                if (g - plateau).abs() <= KINK_TOL * (1.0 + plateau) {
                    return Err(Error::KinkPoint);
                }
                if g < *plateau {
                    return Ok(LocalExponent::Flat);
                }
                let (facet, gap) = body.gauge_active_facet(&y)?;
                if gap <= KINK_TOL * (1.0 + g) {
                    return Err(Error::KinkPoint);
                }
                let rate = 1.0 / body.rows()[facet].offset;
                Ok(LocalExponent::Gauge {
                    gauge: g,
                    rate,
                    alpha: 1.0,
                    plateau: *plateau,
                })
            }
            Exponent::PiecewiseLinear { pieces, domain } => {
                let interior_slack = domain
                    .rows()
                    .iter()
                    .map(|r| r.offset - r.normal.dot(z))
                    .fold(f64::INFINITY, f64::min);
                if interior_slack <= KINK_TOL {
                    return Err(Error::KinkPoint);
                }
                let vals: Vec<f64> = pieces.iter().map(|(a, b)| a.dot(z) + b).collect();
                let (best, _) = vals
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                let runner_up = vals
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != best)
                    .map(|(_, v)| *v)
                    .fold(f64::NEG_INFINITY, f64::max);
                if vals[best] - runner_up <= KINK_TOL * (1.0 + vals[best].abs()) {
                    return Err(Error::KinkPoint);
                }
                Ok(LocalExponent::Affine {
                    value: vals[best],
                    slope: pieces[best].0.norm(),
                })
            }
        }
    }

    /// `‖∇v(z)‖` at a smooth point; [`Error::KinkPoint`] when two pieces are
    /// active within tolerance.
    pub fn exponent_gradient_norm(&self, z: &Vector) -> Result<f64> {
        Ok(self.local_exponent(z)?.gradient_norm())
    }

    /// Exact minimum of `v` over the ball `‖y − z‖ ≤ eps`, computed by
    /// descending the locally active affine piece.
    pub fn exponent_ball_min(&self, z: &Vector, eps: f64) -> Result<f64> {
        Ok(self.local_exponent(z)?.ball_min(eps))
    }

    /// Volume of the level set at `s = -log t`.
    pub fn level_volume(&self, s: f64) -> Result<f64> {
        match self.level_law() {
            LevelLaw::Scaled { body, law, .. } => {
                Ok(body.volume()? * law.scale(s).powi(self.dim as i32))
            }
            LevelLaw::Generic => self.level_set((-s).exp())?.volume(),
        }
    }

    /// `∫₀^∞ w(s)·|K_{e^{-s}}| ds` for the layer-cake kernels.
    fn layer_cake(&self, kernel: Kernel) -> Result<f64> {
        let n = self.dim;
        // base volume captured once so the adaptive pass is cheap
        let base_volume = match self.level_law() {
            LevelLaw::Scaled { body, .. } => Some(body.volume()?),
            LevelLaw::Generic => None,
        };
        let vol_at = |s: f64| -> f64 {
            match self.level_law() {
                LevelLaw::Scaled { law, .. } => base_volume.unwrap() * law.scale(s).powi(n as i32),
                LevelLaw::Generic => self
                    .level_set((-s).exp())
                    .and_then(|k| k.volume())
                    .unwrap_or(0.0),
            }
        };
        let weight = |s: f64| -> f64 {
            match kernel {
                Kernel::Exp => (-s).exp(),
                Kernel::Entropy => (s - 1.0) * (-s).exp(),
            }
        };

        // choose s_max by the concavity tail bound on |K_s|^{1/n}
        let mut s_max = 8.0
            + 2.0 * n as f64
            + match self.level_law() {
                LevelLaw::Scaled {
                    law: ScaleLaw::Plateau { gamma },
                    ..
                } => gamma,
                _ => 0.0,
            };
        let rough = quad::integrate(|s| weight(s).abs() * vol_at(s), 0.0, s_max, 1e-6, 1e-12);
        let scale = rough.value.abs().max(1e-30);
        let mut ok = false;
        for _ in 0..60 {
            let s1 = 0.75 * s_max;
            let a2 = vol_at(s_max).max(0.0).powf(1.0 / n as f64);
            let a1 = vol_at(s1).max(0.0).powf(1.0 / n as f64);
            let slope = ((a2 - a1) / (s_max - s1)).max(0.0);
            let tail = tail_bound(a2, slope, n, s_max);
            if tail <= 1e-12 * scale {
                ok = true;
                break;
            }
            s_max *= 1.4;
        }
        if !ok {
            return Err(Error::TailNotConverged {
                remaining: f64::INFINITY,
            });
        }
        let result = quad::integrate(|s| weight(s) * vol_at(s), 0.0, s_max, 1e-10, 1e-14 * scale);
        Ok(result.value)
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Exp,
    Entropy,
}

/// Locally active structure of the exponent at a smooth point.
#[derive(Debug, Clone, Copy)]
pub(crate) enum LocalExponent {
    /// `v ≡ 0` in a neighborhood (indicator interior, flat top).
    Flat,
    /// `v = max(gauge − plateau, 0)^alpha`, gauge dropping at `rate` per
    /// unit of Euclidean distance along the active facet normal.
    Gauge {
        gauge: f64,
        rate: f64,
        alpha: f64,
        plateau: f64,
    },
    /// `v` locally affine with the given value and gradient norm.
    Affine { value: f64, slope: f64 },
}

impl LocalExponent {
    pub fn gradient_norm(&self) -> f64 {
        match *self {
            LocalExponent::Flat => 0.0,
            LocalExponent::Gauge {
                gauge,
                rate,
                alpha,
                plateau,
            } => {
                let base = (gauge - plateau).max(0.0);
                alpha * base.powf(alpha - 1.0) * rate
            }
            LocalExponent::Affine { slope, .. } => slope,
        }
    }

    pub fn ball_min(&self, eps: f64) -> f64 {
        match *self {
            LocalExponent::Flat => 0.0,
            LocalExponent::Gauge {
                gauge,
                rate,
                alpha,
                plateau,
            } => (gauge - eps * rate - plateau).max(0.0).powf(alpha),
            LocalExponent::Affine { value, slope } => (value - eps * slope).max(0.0),
        }
    }
}

/// `∫₀^∞ (A + B·u)^n (1 + s_max + u) e^{-(s_max + u)} du`, an upper bound for
/// the discarded tail of either kernel.
fn tail_bound(a: f64, b: f64, n: usize, s_max: f64) -> f64 {
    use crate::special::{binomial, factorial};
    let mut acc = 0.0;
    for k in 0..=n {
        acc += binomial(n, k)
            * a.powi((n - k) as i32)
            * b.powi(k as i32)
            * ((1.0 + s_max) * factorial(k) + factorial(k + 1));
    }
    acc * (-s_max).exp()
}

fn dilate(body: &HPolytope, shift: &Vector, scale: f64) -> HPolytope {
    if scale <= 1e-14 {
        return HPolytope::degenerate_point(shift.clone());
    }
    body.scale(scale).translate(shift)
}

fn check_height(height: f64) -> Result<()> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "height {height} must be positive and finite"
        )));
    }
    Ok(())
}

fn check_gauge_body(body: &HPolytope) -> Result<()> {
    if body.is_degenerate() {
        return Err(Error::EmptyInterior);
    }
    for (i, r) in body.rows().iter().enumerate() {
        if r.offset <= 0.0 {
            return Err(Error::OriginNotInterior {
                row: i,
                offset: r.offset,
            });
        }
    }
    body.bounding_box()?;
    Ok(())
}
